//! Bilirubin regressors over RGB or spectral features.

pub mod cv;
pub mod features;
pub mod forest;
pub mod hybrid;
pub mod knn;
pub mod mlp;
pub mod model;
pub mod standardize;
pub mod svr;

pub use cv::{
    cross_validate_with, cross_validated_predictions, cross_validated_with_folds, kfold_split,
    resample_fraction, resample_indices, FoldAssignment,
};
pub use features::{record_features, FeatureMode, FeatureVector, SpectrumFeatures, TrainingSet};
pub use hybrid::fit_stacked_weights;
pub use model::{
    predict, train, train_hybrid, train_knn, train_mlp, train_rf, train_svr, HybridParams,
    HybridWeighting, Learned, ModelKind, ModelSpec, TrainedModel,
};
pub use standardize::{standardize_apply, standardize_fit, Standardizer};
