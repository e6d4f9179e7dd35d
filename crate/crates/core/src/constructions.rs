//! Standard example groups in H^2, built from hyperbolic trigonometry.

use std::f64::consts::PI;

use crate::group::GroupSpec;
use crate::hyperbolic::{HyperbolicPoint, LorentzIsometry};

/// Triangle group data: the group plus the triangle it was built from.
#[derive(Clone, Debug)]
pub struct TriangleGroup {
    pub spec: GroupSpec,
    /// Vertices with angles pi/p, pi/q, pi/r, in that order.
    pub cone_points: [HyperbolicPoint; 3],
    pub orders: [u32; 3],
    pub incenter: HyperbolicPoint,
}

/// Rotation by `theta` about the point at distance `d`, polar angle `phi` from `o`.
pub fn rotation_about(d: f64, phi: f64, theta: f64) -> LorentzIsometry {
    let t = LorentzIsometry::rotation(2, 1, 2, phi)
        .compose(&LorentzIsometry::boost(2, 1, d))
        .compose(&LorentzIsometry::rotation(2, 1, 2, -phi));
    t.compose(&LorentzIsometry::rotation(2, 1, 2, theta)).compose(&t.inverse())
}

/// Point at distance `d` from `o` in direction `phi`.
pub fn polar_point(d: f64, phi: f64) -> HyperbolicPoint {
    HyperbolicPoint::from_spatial(&[d.sinh() * phi.cos(), d.sinh() * phi.sin()])
}

/// Side length opposite the angle `a` of a triangle with angles `a, b, c`.
fn side_opposite(a: f64, b: f64, c: f64) -> f64 {
    ((a.cos() + b.cos() * c.cos()) / (b.sin() * c.sin())).acosh()
}

/// Orientation-preserving triangle group with rotations by `2pi/p`, `2pi/q`,
/// `2pi/r` about the vertices of the (pi/p, pi/q, pi/r) triangle. The
/// `pi/r` vertex sits at `o` and the `pi/q` vertex on the positive x1 axis.
pub fn triangle_group(p: u32, q: u32, r: u32) -> TriangleGroup {
    let (a, b, c) = (PI / p as f64, PI / q as f64, PI / r as f64);
    assert!(a + b + c < PI, "triangle ({p},{q},{r}) is not hyperbolic");
    let rq = side_opposite(a, b, c); // side RQ is opposite P
    let rp = side_opposite(b, a, c); // side RP is opposite Q
    let gens = vec![
        rotation_about(rp, c, 2.0 * PI / p as f64),
        rotation_about(rq, 0.0, 2.0 * PI / q as f64),
        LorentzIsometry::rotation(2, 1, 2, 2.0 * PI / r as f64),
    ];
    let cp = polar_point(rp, c);
    let cq = polar_point(rq, 0.0);
    let cr = HyperbolicPoint::origin(2);
    let pq = side_opposite(c, a, b);
    // sinh of each side weights the opposite vertex
    let v = cp.coords() * rq.sinh() + cq.coords() * rp.sinh() + cr.coords() * pq.sinh();
    let incenter = HyperbolicPoint::from_timelike(&v).expect("positive combination is timelike");
    let mut spec = GroupSpec::new(2, format!("triangle({p},{q},{r})"), gens).expect("valid generators");
    spec.volume = Some(2.0 * PI * (1.0 - 1.0 / p as f64 - 1.0 / q as f64 - 1.0 / r as f64));
    spec.q = Some(p.max(q).max(r));
    TriangleGroup {
        spec,
        cone_points: [cp, cq, cr],
        orders: [p, q, r],
        incenter,
    }
}

/// Infinite cyclic group generated by the x1-boost of length `t`.
pub fn cyclic_boost(n: usize, t: f64) -> GroupSpec {
    let mut s = GroupSpec::new(n, format!("cyclic boost t={t}"), vec![LorentzIsometry::boost(n, 1, t)]).unwrap();
    s.q = Some(1);
    s
}

/// Free group on boosts of length `t` along the x1 and x2 axes.
pub fn schottky(t: f64) -> GroupSpec {
    let b = LorentzIsometry::boost(2, 1, t);
    let turn = LorentzIsometry::rotation(2, 1, 2, PI / 2.0);
    let c = turn.compose(&b).compose(&turn.inverse());
    let mut s = GroupSpec::new(2, format!("schottky rank 2 t={t}"), vec![b, c]).unwrap();
    s.q = Some(1);
    s
}

/// Group files shipped with the crate, by stem name.
pub fn shipped_group_json(name: &str) -> Option<&'static str> {
    match name {
        "triangle_2_3_7" => Some(include_str!("../data/groups/triangle_2_3_7.json")),
        "triangle_2_3_8" => Some(include_str!("../data/groups/triangle_2_3_8.json")),
        "cyclic_boost" => Some(include_str!("../data/groups/cyclic_boost.json")),
        "schottky" => Some(include_str!("../data/groups/schottky.json")),
        _ => None,
    }
}

pub const SHIPPED_GROUPS: [&str; 4] = ["triangle_2_3_7", "triangle_2_3_8", "cyclic_boost", "schottky"];
