//! Second variation of area: index form, stability operator, the helicoid
//! form Q, vertical variations and instability certificates.

mod certificate;
mod helicoid;
mod operators;
mod test_fn;

pub use certificate::{
    certify_instability_h2, certify_instability_helicoid, certify_instability_nosing, h2_test_function,
    nosing_index_value, H2Search, InstabilityCertificate,
};
pub use helicoid::{
    boundary_flux, boundary_flux_limit, bracket_antiderivative, bracket_integral, bracket_integral_quadrature,
    check_tube, q_form, q_form_parts, singular_curve_curvature, vertical_variation_area,
    vertical_variation_differences, QParts, VerticalVariation, TUBE_MARGIN,
};
pub use operators::{
    area_variation, index_density, index_form, index_form_nh_weighted, jacobi_quadratic_of,
    jacobi_vertical_quadratic, l_nh_closed, l_nh_of, operator_l, s_derivative, second_variation_direct,
    z_covariant, z_derivative, AreaVariation, FrameScalar, JacobiQuadratic, SurfaceField, Z_DIFF,
};
pub use test_fn::{FnTestFunction, PhiKDelta, Profile, Separable, TestFunction};

#[cfg(test)]
mod tests;
