use serde::Serialize;

use crate::scalar::Scalar;

use super::instance::Instance;
use super::network::RoadNetwork;

/// Vertices within straight-line distance `radius` of `center`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborSet<S> {
    pub center: usize,
    pub radius: S,
    /// Sorted ascending.
    pub members: Vec<usize>,
    /// Sorted ascending; a subset of `members`.
    pub boundary: Vec<usize>,
}

impl<S: Scalar> NeighborSet<S> {
    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Closed ball of radius `theta` around `c`, with its boundary.
pub fn neighbor_set<S: Scalar>(inst: &Instance<S>, c: usize, theta: S) -> NeighborSet<S> {
    let net = &inst.network;
    let members: Vec<usize> = (0..net.len()).filter(|&v| net.euclid(v, c).le_tol(theta)).collect();
    let boundary = boundary_of(net, &members, c, theta);
    NeighborSet { center: c, radius: theta, members, boundary }
}

/// Members (sorted) that touch a vertex outside the set or lie on the shell
/// of the ball of radius `theta` around `center`.
pub fn boundary_of<S: Scalar>(net: &RoadNetwork<S>, members: &[usize], center: usize, theta: S) -> Vec<usize> {
    let inside = |w: usize| members.binary_search(&w).is_ok();
    members
        .iter()
        .copied()
        .filter(|&v| (net.euclid(v, center) - theta).abs() <= S::tol() || net.adjacent(v).any(|w| !inside(w)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::generate::{generate_instance, GenSpec};

    fn line() -> Instance<f64> {
        crate::roadnet::generate::tests::line_instance(4, 1.0)
    }

    #[test]
    fn zero_radius_is_singleton() {
        let s = neighbor_set(&line(), 2, 0.0);
        assert_eq!(s.members, vec![2]);
        assert_eq!(s.boundary, vec![2]);
    }

    #[test]
    fn unit_radius_on_line() {
        let s = neighbor_set(&line(), 0, 1.0);
        assert_eq!(s.members, vec![0, 1]);
        assert_eq!(s.boundary, vec![1]);
    }

    #[test]
    fn unit_grid_small_radii() {
        let spec = GenSpec::grid(20, 20, 1.0, 1, 1);
        let inst: Instance<f64> = generate_instance(&spec, 3).unwrap();
        let c = 10 * 20 + 10;
        assert_eq!(neighbor_set(&inst, c, 1.0).len(), 5);
        assert_eq!(neighbor_set(&inst, c, 2.0).len(), 13);
    }

    #[test]
    fn grid_member_growth_is_quadratic() {
        let spec = GenSpec::grid(20, 20, 1.0, 1, 1);
        let inst: Instance<f64> = generate_instance(&spec, 3).unwrap();
        let c = 10 * 20 + 10;
        let small = neighbor_set(&inst, c, 3.0);
        let large = neighbor_set(&inst, c, 6.0);
        let ratio = large.len() as f64 / small.len() as f64;
        assert!((3.0..=5.0).contains(&ratio), "{ratio}");
        let ratio = large.boundary.len() as f64 / small.boundary.len() as f64;
        assert!((1.5..=2.5).contains(&ratio), "{ratio}");
    }
}
