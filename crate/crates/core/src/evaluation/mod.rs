//! Agreement statistics, ROC analysis, learning curves and plots.

pub mod chart;
pub mod curve;
pub mod report;
pub mod stats;
pub mod svg;

pub use chart::{cross_chart_rmse, default_chart_test, ChartRmseReport};
pub use curve::{
    default_fractions, fraction_grid, fraction_seeds, learning_curve, stability_summary, CurveMetrics,
    CurveOptions, CurvePoint, LearningCurve, StabilitySummary,
};
pub use report::{curve_csv, evaluate, EvaluationReport};
pub use stats::{
    agreement, bland_altman, linear_fit, mean, pearson, prediction_band_95, roc, sample_std, spectral_rmse,
    t_quantile, t_two_tailed_p, AgreementReport, BlandAltman, LinearFit, PredictionBand, RocReport,
    DEFAULT_ROC_THRESHOLD,
};
