/// Fraction of elastic and Compton intensity that survives towards a detector
/// at scattering angle 2θ_B, for a crystal rotated by `chi` about the beam
/// away from the polarization plane: `1 - sin²(2θ_B) cos²(χ)`.
pub fn polarization_suppression(bragg_angle: f64, chi: f64) -> f64 {
    let s = (2.0 * bragg_angle).sin();
    let c = chi.cos();
    (1.0 - s * s * c * c).clamp(0.0, 1.0)
}
