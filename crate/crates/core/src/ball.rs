//! Open balls `B_eps(x) = { y | p(x,y) - p(x,x) < eps }` and T1 separation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::space::PmSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, space: &PmSpace, candidate: &Point) -> Result<bool> {
        ball_contains(space, &self.center, self.radius, candidate)
    }
}

/// Membership of `candidate` in `B_eps(center)`. Balls with `eps <= 0` are
/// empty and are answered without evaluating the distance.
pub fn ball_contains(space: &PmSpace, center: &Point, eps: f64, candidate: &Point) -> Result<bool> {
    if eps.is_nan() || eps <= 0.0 {
        return Ok(false);
    }
    let pcc = space.p(center, center)?;
    let pcx = space.p(center, candidate)?;
    Ok(pcx - pcc < eps)
}

/// For distinct `x`, `y`, returns the balls `B_{p(x,y)-p(x,x)}(x)` and
/// `B_{p(y,x)-p(y,y)}(y)` when both radii are positive; each contains its own
/// center and not the other point. Returns `None` when either radius is not
/// positive, i.e. the pair is not separated this way.
pub fn t1_witness(space: &PmSpace, x: &Point, y: &Point) -> Result<Option<(Ball, Ball)>> {
    if x == y {
        return Err(Error::EqualPoints(x.to_string()));
    }
    let (pxx, pxy, pyy, pyx) = (
        space.p(x, x)?,
        space.p(x, y)?,
        space.p(y, y)?,
        space.p(y, x)?,
    );
    if !(pxx < pxy && pyy < pyx) {
        return Ok(None);
    }
    let bx = Ball {
        center: x.clone(),
        radius: pxy - pxx,
    };
    let by = Ball {
        center: y.clone(),
        radius: pyx - pyy,
    };
    let separated = bx.contains(space, x)?
        && !bx.contains(space, y)?
        && by.contains(space, y)?
        && !by.contains(space, x)?;
    Ok(separated.then_some((bx, by)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{make_metric_line, make_punctured_line, make_sum_space};
    use proptest::prelude::*;

    fn pos(x: f64) -> Point {
        Point::positive(x).unwrap()
    }

    #[test]
    fn sum_space_small_points_enter_every_ball() {
        let s = make_sum_space();
        // s(x, z) - s(x, x) = z for z != x.
        assert!(ball_contains(&s, &pos(3.0), 0.5, &pos(0.25)).unwrap());
        assert!(!ball_contains(&s, &pos(3.0), 0.5, &pos(0.75)).unwrap());
    }

    #[test]
    fn empty_balls() {
        let m = make_metric_line();
        assert!(!ball_contains(&m, &Point::Real(1.0), 0.0, &Point::Real(1.0)).unwrap());
        assert!(!ball_contains(&m, &Point::Real(1.0), -2.0, &Point::Real(1.0)).unwrap());
        // No evaluation happens for empty balls, so kind mismatches pass silently.
        assert!(!ball_contains(&m, &Point::Adjoined, 0.0, &Point::Real(1.0)).unwrap());
        assert!(ball_contains(&m, &Point::Adjoined, 1.0, &Point::Real(1.0)).is_err());
    }

    #[test]
    fn metric_ball() {
        let m = make_metric_line();
        assert!(ball_contains(&m, &Point::Real(0.0), 1.0, &Point::Real(0.5)).unwrap());
        assert!(!ball_contains(&m, &Point::Real(0.0), 1.0, &Point::Real(1.0)).unwrap());
    }

    #[test]
    fn punctured_line_zero_in_every_ball_around_a() {
        let s = make_punctured_line();
        for eps in [1e-9, 1e-3, 1.0] {
            assert!(ball_contains(&s, &Point::Adjoined, eps, &Point::Real(0.0)).unwrap());
        }
    }

    #[test]
    fn t1_witnesses() {
        let s = make_sum_space();
        let (b1, b2) = t1_witness(&s, &pos(1.0), &pos(2.0)).unwrap().unwrap();
        assert_eq!((b1.center, b1.radius), (pos(1.0), 2.0));
        assert_eq!((b2.center, b2.radius), (pos(2.0), 1.0));

        let m = make_metric_line();
        let (b1, b2) = t1_witness(&m, &Point::Real(0.0), &Point::Real(3.0))
            .unwrap()
            .unwrap();
        assert_eq!((b1.radius, b2.radius), (3.0, 3.0));

        let p = make_punctured_line();
        assert!(t1_witness(&p, &Point::Adjoined, &Point::Real(0.0))
            .unwrap()
            .is_none());
        assert!(matches!(
            t1_witness(&p, &Point::Real(1.0), &Point::Real(1.0)),
            Err(Error::EqualPoints(_))
        ));
    }

    proptest! {
        #[test]
        fn balls_grow_with_radius(c in -10.0f64..10.0, x in -10.0f64..10.0, e1 in -1.0f64..5.0, de in 0.0f64..5.0) {
            let m = make_punctured_line();
            let (c, x) = (Point::Real(c), Point::Real(x));
            if ball_contains(&m, &c, e1, &x).unwrap() {
                prop_assert!(ball_contains(&m, &c, e1 + de, &x).unwrap());
            }
        }

        #[test]
        fn centers_belong_to_their_balls(c in 1e-6f64..10.0, eps in 1e-9f64..10.0) {
            let s = make_sum_space();
            prop_assert!(ball_contains(&s, &pos(c), eps, &pos(c)).unwrap());
            prop_assert!(ball_contains(&make_punctured_line(), &Point::Adjoined, eps, &Point::Adjoined).unwrap());
        }

        #[test]
        fn sum_space_balls_always_meet(x in 1e-3f64..10.0, y in 1e-3f64..10.0, eps in 1e-6f64..5.0, delta in 1e-6f64..5.0) {
            prop_assume!(x != y);
            let s = make_sum_space();
            let mut z = eps.min(delta) / 2.0;
            if z == x || z == y {
                z /= 3.0;
            }
            let z = pos(z);
            prop_assert!(ball_contains(&s, &pos(x), eps, &z).unwrap());
            prop_assert!(ball_contains(&s, &pos(y), delta, &z).unwrap());
        }
    }
}
