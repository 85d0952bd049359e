use serde::{Deserialize, Serialize};

use super::ShapeState;
use crate::scalar::Real;

/// World-frame x positions of the pads and centre of mass, mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement<T> {
    pub left: T,
    pub right: T,
    pub com: T,
}

impl<T: Real> Placement<T> {
    /// `shape` with its left pad at world position `left`.
    pub fn of(shape: &ShapeState<T>, left: T) -> Self {
        Self {
            left,
            right: left + shape.chord(),
            com: left + shape.com[0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlipMode {
    /// Left pad slides, right pad is the anchor.
    LeftSlides,
    /// Right pad slides, left pad is the anchor.
    RightSlides,
    /// Capacities balance; the centre of mass holds still.
    Stuck,
}

/// Which pad gives way given the Coulomb capacities `μ·N` of each.
pub fn slip_mode<T: Real>(cap_left: T, cap_right: T, stick_tolerance: T) -> SlipMode {
    if (cap_left - cap_right).abs() <= stick_tolerance * cap_left.max(cap_right) {
        SlipMode::Stuck
    } else if cap_left < cap_right {
        SlipMode::LeftSlides
    } else {
        SlipMode::RightSlides
    }
}

/// Places the next shape relative to `prev` under `mode`.
pub fn slip_step<T: Real>(prev: &Placement<T>, next: &ShapeState<T>, mode: SlipMode) -> Placement<T> {
    let left = match mode {
        SlipMode::RightSlides => prev.left,
        SlipMode::LeftSlides => prev.right - next.chord(),
        SlipMode::Stuck => prev.com - next.com[0],
    };
    Placement::of(next, left)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(chord: f64, com: f64) -> ShapeState<f64> {
        ShapeState {
            vertices: vec![[0.0, 0.0], [chord, 0.0]],
            psi_left: 0.0,
            psi_right: 0.0,
            contact_points: [[0.0, 0.0], [chord, 0.0]],
            com: [com, 0.0],
        }
    }

    #[test]
    fn weaker_left_pad_slides_forward() {
        let prev = Placement::of(&flat(10.0, 5.0), 0.0);
        assert_eq!(slip_mode(0.1, 1.0, 0.5), SlipMode::LeftSlides);
        let next = slip_step(&prev, &flat(8.0, 4.0), SlipMode::LeftSlides);
        assert_eq!(next.left, 2.0);
        assert_eq!(next.right, 10.0);
        assert_eq!(next.com - prev.com, 1.0);
    }

    #[test]
    fn weaker_right_pad_slides_back() {
        let prev = Placement::of(&flat(10.0, 5.0), 0.0);
        assert_eq!(slip_mode(1.0, 0.1, 0.5), SlipMode::RightSlides);
        let next = slip_step(&prev, &flat(8.0, 4.0), SlipMode::RightSlides);
        assert_eq!((next.left, next.right, next.com), (0.0, 8.0, 4.0));
    }

    #[test]
    fn balanced_pads_hold_com() {
        assert_eq!(slip_mode(1.0, 0.6, 0.5), SlipMode::Stuck);
        assert_eq!(slip_mode(1.0, 1.0, 0.0), SlipMode::Stuck);
        let prev = Placement::of(&flat(10.0, 5.0), 3.0);
        let next = slip_step(&prev, &flat(8.0, 3.0), SlipMode::Stuck);
        assert_eq!(next.com, prev.com);
        assert_eq!(next.left, 5.0);
    }
}
