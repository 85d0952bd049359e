use super::{BodyModel, SimError};
use crate::scalar::{from_usize, Real};

/// A realized body shape in the body frame: left pad at the origin, right pad
/// on the positive x axis, ground line at `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeState<T> {
    /// Segment endpoints, mm.
    pub vertices: Vec<[T; 2]>,
    /// Angle of the left end segment above the ground, radians.
    pub psi_left: T,
    /// Angle of the right end segment above the ground, radians.
    pub psi_right: T,
    pub contact_points: [[T; 2]; 2],
    /// Centre of mass, mm.
    pub com: [T; 2],
}

impl<T: Real> ShapeState<T> {
    /// Distance between the two pads, mm.
    pub fn chord(&self) -> T {
        self.contact_points[1][0] - self.contact_points[0][0]
    }
}

/// Shape of `body` under activation vector `a` (one entry per actuator).
pub fn shape_from_activation<T: Real>(body: &BodyModel<T>, a: &[T]) -> Result<ShapeState<T>, SimError> {
    if a.len() != body.actuators.len() {
        return Err(SimError::ActivationArity {
            expected: body.actuators.len(),
            got: a.len(),
        });
    }
    for (i, &v) in a.iter().enumerate() {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(SimError::ActivationOutOfRange {
                actuator: i + 1,
                value: v.as_f64(),
            });
        }
    }

    let n = body.segment_count;
    let h = body.segment_length();
    let half = T::lit(0.5);

    // Heading at each segment's midpoint, integrated from the left end.
    let mut heading = Vec::with_capacity(n);
    let mut turned = T::zero();
    for k in 0..n {
        let s0 = from_usize::<T>(k) * h;
        let s1 = s0 + h;
        let kappa: T = body
            .actuators
            .iter()
            .zip(a)
            .map(|(span, &ak)| ak * span.max_curvature * span.overlap(s0, s1) / h)
            .sum();
        heading.push(-(turned + kappa * h * half));
        turned = turned + kappa * h;
    }

    let mut raw = Vec::with_capacity(n + 1);
    let (mut x, mut y) = (T::zero(), T::zero());
    raw.push([x, y]);
    for &phi in &heading {
        x = x + h * phi.cos();
        y = y + h * phi.sin();
        raw.push([x, y]);
    }

    // Rotate so both ends sit on the ground line.
    let tilt = y.atan2(x);
    let (sin, cos) = (-tilt).sin_cos();
    let vertices: Vec<[T; 2]> = raw
        .iter()
        .map(|&[px, py]| [cos * px - sin * py, sin * px + cos * py])
        .collect();

    let chord = vertices[n][0];
    if !(chord > T::zero()) {
        return Err(SimError::Degenerate { chord: chord.as_f64() });
    }
    let lowest = vertices.iter().map(|v| v[1]).fold(T::infinity(), T::min);
    // Rounding slack: 1e-9 of the length, widened for low-precision scalars.
    let slack = T::lit(1e-9).max(T::epsilon() * T::lit(64.0)) * body.length;
    if lowest < -slack {
        return Err(SimError::BelowGround {
            depth: (-lowest).as_f64(),
        });
    }

    let inv = T::one() / from_usize::<T>(n);
    let mut com = [T::zero(); 2];
    for w in vertices.windows(2) {
        com[0] = com[0] + (w[0][0] + w[1][0]) * half * inv;
        com[1] = com[1] + (w[0][1] + w[1][1]) * half * inv;
    }

    Ok(ShapeState {
        psi_left: heading[0] - tilt,
        psi_right: tilt - heading[n - 1],
        contact_points: [[T::zero(), T::zero()], [chord, T::zero()]],
        com,
        vertices,
    })
}

/// `(ψ_left, ψ_right)` of a shape.
pub fn contact_angles<T: Real>(shape: &ShapeState<T>) -> (T, T) {
    (shape.psi_left, shape.psi_right)
}

/// Pad normal forces in newtons from the lever rule.
pub fn normal_forces<T: Real>(shape: &ShapeState<T>, body: &BodyModel<T>) -> Result<(T, T), SimError> {
    let chord = shape.chord();
    if !(chord > T::zero()) {
        return Err(SimError::Degenerate { chord: chord.as_f64() });
    }
    let x = shape.com[0] - shape.contact_points[0][0];
    if !(x >= T::zero() && x <= chord) {
        return Err(SimError::Tipping {
            substep: None,
            com: x.as_f64(),
            chord: chord.as_f64(),
        });
    }
    let w = body.weight();
    let right = w * x / chord;
    Ok((w - right, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasistatic::{mirror_body, ActuatorSpan};
    use crate::statecore::MechanismSpec;

    fn body() -> BodyModel<f64> {
        let pad = MechanismSpec::binary("pad", 0.26, 1.2, 0.2).unwrap();
        BodyModel::reference(pad.clone(), pad)
    }

    fn symmetric() -> BodyModel<f64> {
        let mut b = body();
        b.actuators = vec![ActuatorSpan::new(0.0, 50.0, 0.02), ActuatorSpan::new(30.0, 80.0, 0.02)];
        b
    }

    #[test]
    fn relaxed_body_is_straight() {
        let s = shape_from_activation(&body(), &[0.0, 0.0]).unwrap();
        assert_eq!(contact_angles(&s), (0.0, 0.0));
        assert!((s.chord() - 80.0).abs() < 1e-12);
        assert!((s.com[0] - 40.0).abs() < 1e-12);
        assert!(s.com[1].abs() < 1e-12);
    }

    #[test]
    fn symmetric_activation_gives_symmetric_shape() {
        let s = shape_from_activation(&symmetric(), &[1.0, 1.0]).unwrap();
        assert!((s.psi_left - s.psi_right).abs() < 1e-12);
        assert!((s.com[0] - s.chord() / 2.0).abs() < 1e-9);
        assert!(s.psi_left > 0.26);
    }

    #[test]
    fn mirrored_body_gives_mirrored_shape() {
        let b = body();
        let m = mirror_body(&b);
        let s = shape_from_activation(&b, &[0.7, 0.2]).unwrap();
        let t = shape_from_activation(&m, &[0.2, 0.7]).unwrap();
        assert!((s.psi_left - t.psi_right).abs() < 1e-12);
        assert!((s.psi_right - t.psi_left).abs() < 1e-12);
        assert!((s.chord() - t.chord()).abs() < 1e-9);
        assert!((s.com[0] - (t.chord() - t.com[0])).abs() < 1e-9);
        for (p, q) in s.vertices.iter().zip(t.vertices.iter().rev()) {
            assert!((p[0] - (t.chord() - q[0])).abs() < 1e-9);
            assert!((p[1] - q[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn segments_keep_their_length() {
        let s = shape_from_activation(&body(), &[0.9, 0.4]).unwrap();
        for w in s.vertices.windows(2) {
            let len = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
            assert!((len - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn arch_stays_above_ground() {
        let s = shape_from_activation(&body(), &[1.0, 1.0]).unwrap();
        assert!(s.vertices.iter().all(|v| v[1] >= -1e-9));
        assert!(s.com[1] > 0.0);
    }

    #[test]
    fn activation_out_of_range() {
        assert!(matches!(
            shape_from_activation(&body(), &[1.2, 0.0]),
            Err(SimError::ActivationOutOfRange { actuator: 1, .. })
        ));
        assert!(matches!(
            shape_from_activation(&body(), &[0.5]),
            Err(SimError::ActivationArity { .. })
        ));
    }

    #[test]
    fn lever_rule() {
        let b = body();
        let w = b.weight();
        let mut s = shape_from_activation(&b, &[0.0, 0.0]).unwrap();
        let (l, r) = normal_forces(&s, &b).unwrap();
        assert!((l - w / 2.0).abs() < 1e-15 && (r - w / 2.0).abs() < 1e-15);
        s.com[0] = 0.0;
        assert_eq!(normal_forces(&s, &b).unwrap(), (w, 0.0));
        s.com[0] = 60.0;
        let (l, r) = normal_forces(&s, &b).unwrap();
        assert!((l - w / 4.0).abs() < 1e-15 && (r - 3.0 * w / 4.0).abs() < 1e-15);
        s.com[0] = 81.0;
        assert!(matches!(normal_forces(&s, &b), Err(SimError::Tipping { .. })));
    }

    #[test]
    fn single_precision_shape() {
        let pad = MechanismSpec::<f32>::binary("pad", 0.26, 1.2, 0.2).unwrap();
        let b = BodyModel::reference(pad.clone(), pad);
        let s = shape_from_activation(&b, &[1.0f32, 1.0]).unwrap();
        assert!(s.psi_left > 0.26 && s.psi_right > 0.26);
    }
}
