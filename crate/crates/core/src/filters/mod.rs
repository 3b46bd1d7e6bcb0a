//! Polynomial (shift-domain) and spectral (mask-domain) filters.

mod adaptive;
mod mask;
mod polynomial;

pub use adaptive::{
    column_means, fit_adaptive_polynomial, fit_adaptive_polynomial_with, map_scores, spectral_radius,
    AdaptiveFit, AdaptiveOptions, DEFAULT_GRID,
};
pub use mask::{make_ranked_mask, spectral_filter, MaskSide, MaskSource, PassKind, SpectralMask};
pub use polynomial::{
    apply_polynomial, apply_polynomial_with, poly_power, poly_power_with, poly_powers, PolynomialFilter,
    PowerPath,
};
