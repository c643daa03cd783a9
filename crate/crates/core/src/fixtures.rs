//! Bundled example maps used throughout the test suite and the CLI.

use crate::branch::Branch;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::map::{PiecewiseMap, Side};
use crate::scalar::{Backend, Scalar};

/// Golden mean (sqrt(5) - 1) / 2, the rotation number of the golden fixtures.
pub const GOLDEN_ALPHA: f64 = 0.618_033_988_749_894_9;

pub const F1_SPEC: &str = "backend = exact
partition = [1/2]
branch {
  kind = affine
  slope = 1/2
  intercept = 1/8
}
side = right
branch {
  kind = affine
  slope = 1/2
  intercept = 3/8
}
";

pub const F2_SPEC: &str = "backend = exact
partition = [1/2]
branch {
  kind = affine
  slope = 1/2
  intercept = 1/4
}
side = right
branch {
  kind = affine
  slope = 1/2
  intercept = 0
}
";

pub const GOLDEN_SPEC: &str = "backend = float
partition = [0.3819660112501051]
branch {
  kind = affine
  slope = 1.0
  intercept = 0.6180339887498949
}
side = right
branch {
  kind = affine
  slope = 1.0
  intercept = -0.3819660112501051
}
";

pub const GOLDEN_SQRT_SPEC: &str = "backend = float
partition = [0.1458980337503154]
branch {
  kind = expr
  expr = \"(sqrt(x) + 0.6180339887498949) * (sqrt(x) + 0.6180339887498949)\"
}
side = right
branch {
  kind = expr
  expr = \"(sqrt(x) + 0.6180339887498949 - 1) * (sqrt(x) + 0.6180339887498949 - 1)\"
}
";

pub const INVOLUTION_SPEC: &str = "backend = exact
partition = [3/5]
branch {
  kind = affine
  slope = -1
  intercept = 3/5
}
side = right
branch {
  kind = affine
  slope = -1
  intercept = 8/5
}
";

/// Slope-1/2 pair with two fixed points (1/4 and 3/4) and no connections.
pub fn f1() -> PiecewiseMap {
    PiecewiseMap::new(
        Backend::Exact,
        vec![Scalar::from_rational(1, 2, Backend::Exact)],
        vec![
            Branch::affine_rational((1, 2), (1, 8), Backend::Exact),
            Branch::affine_rational((1, 2), (3, 8), Backend::Exact),
        ],
        vec![Side::Right],
    )
    .expect("f1 fixture")
}

/// Slope-1/2 pair whose left lateral limit lands on the breakpoint: one
/// connection, no periodic points, orbit mass piling at 1/2.
pub fn f2() -> PiecewiseMap {
    PiecewiseMap::new(
        Backend::Exact,
        vec![Scalar::from_rational(1, 2, Backend::Exact)],
        vec![
            Branch::affine_rational((1, 2), (1, 4), Backend::Exact),
            Branch::affine_rational((1, 2), (0, 1), Backend::Exact),
        ],
        vec![Side::Right],
    )
    .expect("f2 fixture")
}

/// Rotation by `alpha` encoded as a 2-piece map with a breakpoint at
/// `1 - alpha`. Works for either backend.
pub fn rotation(alpha: Scalar) -> Result<PiecewiseMap> {
    let backend = alpha.backend();
    let one = Scalar::one(backend);
    if alpha.is_negative() || alpha.cmp_value(&one) != std::cmp::Ordering::Less || alpha.is_zero() {
        return Err(Error::Config("rotation angle must lie in (0,1)".into()));
    }
    let breakpoint = one.sub(&alpha);
    let slope = Scalar::one(backend);
    PiecewiseMap::new(
        backend,
        vec![breakpoint],
        vec![
            Branch::affine(slope.clone(), alpha.clone()),
            Branch::affine(slope, alpha.sub(&one)),
        ],
        vec![Side::Right],
    )
}

/// Golden-mean rotation (float backend).
pub fn golden() -> PiecewiseMap {
    rotation(Scalar::Float(GOLDEN_ALPHA)).expect("golden fixture")
}

/// Golden rotation conjugated by y -> y^2: branches (sqrt(x) + a)^2 and
/// (sqrt(x) + a - 1)^2 with breakpoint a^4. Its invariant CDF is sqrt(x).
pub fn golden_sqrt() -> PiecewiseMap {
    let alpha = GOLDEN_ALPHA;
    let one_minus = 1.0 - alpha;
    let breakpoint = one_minus * one_minus; // (1-a)^2 = a^4
    let left = Expr::parse(&format!("(sqrt(x) + {alpha:?}) * (sqrt(x) + {alpha:?})"))
        .expect("left branch expression");
    let right = Expr::parse(&format!(
        "(sqrt(x) + {alpha:?} - 1) * (sqrt(x) + {alpha:?} - 1)"
    ))
    .expect("right branch expression");
    PiecewiseMap::new(
        Backend::Float,
        vec![Scalar::Float(breakpoint)],
        vec![Branch::Expr(left), Branch::Expr(right)],
        vec![Side::Right],
    )
    .expect("golden_sqrt fixture")
}

/// Orientation-reversing pair: 3/5 - x on [0, 3/5), 8/5 - x on [3/5, 1].
/// Already an interval exchange with both pieces flipped.
pub fn involution() -> PiecewiseMap {
    PiecewiseMap::new(
        Backend::Exact,
        vec![Scalar::from_rational(3, 5, Backend::Exact)],
        vec![
            Branch::affine_rational((-1, 1), (3, 5), Backend::Exact),
            Branch::affine_rational((-1, 1), (8, 5), Backend::Exact),
        ],
        vec![Side::Right],
    )
    .expect("involution fixture")
}

/// Names and one-line descriptions of the bundled fixtures.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "f1",
            "slope-1/2 pair with two fixed points and no connections",
        ),
        (
            "f2",
            "slope-1/2 pair with a connection and no periodic points",
        ),
        ("golden", "golden-mean rotation encoded as a 2-piece map"),
        (
            "golden-sqrt",
            "golden rotation conjugated by x -> x^2 (invariant CDF sqrt(x))",
        ),
        ("involution", "2-piece orientation-reversing isometry"),
    ]
}

pub fn by_name(name: &str) -> Option<PiecewiseMap> {
    match name {
        "f1" => Some(f1()),
        "f2" => Some(f2()),
        "golden" => Some(golden()),
        "golden-sqrt" => Some(golden_sqrt()),
        "involution" => Some(involution()),
        _ => None,
    }
}

pub fn spec_text(name: &str) -> Option<&'static str> {
    match name {
        "f1" => Some(F1_SPEC),
        "f2" => Some(F2_SPEC),
        "golden" => Some(GOLDEN_SPEC),
        "golden-sqrt" => Some(GOLDEN_SQRT_SPEC),
        "involution" => Some(INVOLUTION_SPEC),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_format::{parse_map_spec, serialize_map_spec};

    #[test]
    fn every_fixture_parses_validates_and_matches_its_text() {
        for (name, _) in list() {
            let built = by_name(name).unwrap();
            let report = built.validate();
            assert!(report.is_valid(), "{name}: {:?}", report.violations);
            let text = spec_text(name).unwrap();
            let parsed = parse_map_spec(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(parsed, built, "{name}");
            assert_eq!(serialize_map_spec(&built), text, "{name}");
        }
        assert_eq!(list().len(), 5);
    }

    #[test]
    fn golden_breakpoint_identities() {
        let a = GOLDEN_ALPHA;
        // golden identity a^2 + a = 1 holds exactly in f64 for this literal
        assert_eq!(a * a + a - 1.0, 0.0);
        let g = golden();
        assert_eq!(g.partition()[1].to_f64(), 1.0 - a);
    }

    #[test]
    fn rational_rotation_is_exact() {
        let map = rotation(Scalar::from_rational(13, 21, Backend::Exact)).unwrap();
        assert!(map.validate().is_valid());
        let x = Scalar::from_rational(1, 21, Backend::Exact);
        assert_eq!(
            map.evaluate(&x).unwrap(),
            Scalar::from_rational(14, 21, Backend::Exact)
        );
    }
}
