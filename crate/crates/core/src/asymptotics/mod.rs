//! Asymptotic estimators on Cartan clouds: limit cone, directional growth, critical exponents,
//! temperedness and growth-bound checks, Anosov gap fits and a Zariski-density proxy.

mod anosov;
mod cone;
mod fit;
mod growth;
mod report;
mod zariski;

pub use anosov::{anosov_gap, AnosovFit, MIN_LAYERS};
pub use cone::{limit_cone, norm_completeness_radius, ConeEstimate};
pub use fit::{fit_line, linspace, LineFit};
pub use growth::{
    bounds_check, critical_exponent, direction_grid, directional_growth, temperedness_verdict, ApertureFit, BoundRow,
    BoundsCheck, CountSettings, DirectionalGrowth, ExponentFit, TemperednessVerdict, Verdict, DEFAULT_APERTURES,
};
pub use report::{growth_report, GrowthOptions, GrowthReport, KmoRow};
pub use zariski::{zariski_span_rank, ZariskiRank, ZariskiSettings};
