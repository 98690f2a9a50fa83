mod common;

use proptest::prelude::*;

use mafstsp_core::baselines::{hc_vns_with, VnsConfig};
use mafstsp_core::decode::decode_route;
use mafstsp_core::eval::{timing, validate_solution};
use mafstsp_core::partition::{build_meta_graph, partition, partition_nn, set_distance, MetaMetric, PartitionMethod};
use mafstsp_core::pipeline::{solve, RunConfig};
use mafstsp_core::roadnet::{
    generate_instance, instance_to_json, neighbor_set, parse_instance, road_distances, GenSpec, Instance,
};
use mafstsp_core::settsp::{build_set_system, edge_cost, solve_set_tsp, Backend, SetCosts, SetMode, SolveOptions};
use mafstsp_core::solution::VisitOrder;

fn grid(seed: u64, side: usize, depots: usize, customers: usize) -> Instance<f64> {
    generate_instance(&GenSpec::grid(side, side, 0.1, depots, customers), seed).unwrap()
}

fn random_geometric(seed: u64, depots: usize, customers: usize) -> Instance<f64> {
    generate_instance(&GenSpec::random_geometric(40, 2.0, 0.45, depots, customers), seed).unwrap()
}

fn all_pairs(inst: &Instance<f64>) -> mafstsp_core::DistanceOracle {
    road_distances(inst, 0..inst.network.len()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn road_distance_never_beats_straight_line(seed in 0u64..10_000) {
        let inst = random_geometric(seed, 2, 5);
        let o = all_pairs(&inst);
        for u in 0..inst.network.len() {
            for v in 0..inst.network.len() {
                prop_assert!(o.road(u, v) >= inst.euclid(u, v) - 1e-9);
            }
        }
    }

    #[test]
    fn neighbor_sets_grow_with_radius(seed in 0u64..10_000, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let inst = random_geometric(seed, 1, 3);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for &c in &inst.customers {
            let small = neighbor_set(&inst, c, lo);
            let large = neighbor_set(&inst, c, hi);
            prop_assert!(small.members.iter().all(|v| large.contains(*v)));
            prop_assert!(small.boundary.iter().all(|v| small.contains(*v)));
        }
    }

    #[test]
    fn instance_json_round_trips(seed in 0u64..10_000, k in 0usize..4) {
        let mut inst = random_geometric(seed, 2, 4);
        inst.drones_per_truck = k;
        let back: Instance<f64> = parse_instance(&instance_to_json(&inst), "round trip").unwrap();
        prop_assert_eq!(back.network.len(), inst.network.len());
        prop_assert_eq!(&back.depots, &inst.depots);
        prop_assert_eq!(&back.customers, &inst.customers);
        prop_assert_eq!(back.drones_per_truck, k);
        prop_assert_eq!(instance_to_json(&back), instance_to_json(&inst));
    }

    #[test]
    fn partitions_cover_each_customer_once(seed in 0u64..10_000, m in 1usize..4, n in 0usize..9) {
        let inst = grid(seed, 10, m, n);
        let o = all_pairs(&inst);
        for method in PartitionMethod::ALL {
            let a = partition(&inst, &o, method, inst.partition_theta()).unwrap();
            prop_assert!(a.check(&inst).is_ok());
            let mut seen: Vec<usize> = a.groups.values().flatten().copied().collect();
            seen.sort_unstable();
            let mut want = inst.customers.clone();
            want.sort_unstable();
            prop_assert_eq!(seen, want);
            prop_assert_eq!(a, partition(&inst, &o, method, inst.partition_theta()).unwrap());
        }
    }

    #[test]
    fn set_distance_shrinks_as_sets_grow(seed in 0u64..10_000, a in 0.0f64..0.6, b in 0.0f64..0.6) {
        let inst = grid(seed, 8, 1, 3);
        let o = all_pairs(&inst);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (c1, c2) = (inst.customers[0], inst.customers[1]);
        prop_assert!(set_distance(&inst, &o, c1, c2, hi) <= set_distance(&inst, &o, c1, c2, lo) + 1e-9);
    }

    #[test]
    fn separated_customers_go_to_their_depot(offset in 1usize..4) {
        let mut inst = grid(0, 12, 1, 0);
        inst.depots = vec![0, 143];
        inst.customers = vec![offset, 12 * offset, 143 - offset];
        let o = all_pairs(&inst);
        let meta = build_meta_graph(&inst, &o, MetaMetric::Node, 0.0);
        let groups = partition_nn(&meta, &inst.depots, &inst.customers, false);
        prop_assert_eq!(&groups[&0], &vec![offset, 12 * offset]);
        prop_assert_eq!(&groups[&143], &vec![143 - offset]);
    }

    #[test]
    fn reduced_sets_only_remove_options(seed in 0u64..10_000) {
        let inst = common::set_fixture(seed, 4, 6);
        let o = all_pairs(&inst);
        let p = inst.depots[0];
        let cost = |mode| {
            let sys = build_set_system(&inst, p, &inst.customers, inst.drone_range, mode);
            let costs = SetCosts::new(&inst, &o, &sys);
            solve_set_tsp(&sys, &costs, &SolveOptions::with_backend(Backend::ExactDp)).unwrap().cost
        };
        let full = cost(SetMode::Full);
        let no_overlap = cost(SetMode::NoOverlap);
        prop_assert!(no_overlap >= full - 1e-9);
        prop_assert!(cost(SetMode::Both) >= no_overlap - 1e-9);
        prop_assert!(cost(SetMode::BoundaryOnly) >= full - 1e-9);
    }

    #[test]
    fn same_set_steps_never_exceed_driving_through_the_customer(seed in 0u64..10_000) {
        let inst = common::set_fixture(seed, 3, 6);
        let o = all_pairs(&inst);
        let sys = build_set_system(&inst, inst.depots[0], &inst.customers, inst.drone_range, SetMode::Full);
        for s in &sys.sets {
            for &u in &s.members {
                for &v in &s.members {
                    let truck = (o.road(u, s.center) + o.road(s.center, v)) / inst.truck_speed;
                    prop_assert!(edge_cost(&inst, &o, &sys, u, v) <= truck + 1e-12);
                }
            }
        }
    }

    #[test]
    fn decoding_improves_with_more_drones(seed in 0u64..10_000, n in 1usize..6) {
        let inst = grid(seed, 9, 1, n);
        let o = all_pairs(&inst);
        let order = VisitOrder { depot: inst.depots[0], order: inst.customers.clone() };
        let mut last = f64::INFINITY;
        for k in 0..4 {
            let route = decode_route(&inst, &o, &order, k).unwrap();
            prop_assert!((timing(&inst, &route).cost - route.cost).abs() <= 1e-6);
            prop_assert!(route.cost <= last + 1e-9);
            last = route.cost;
        }
    }

    #[test]
    fn route_cost_covers_driving_time(seed in 0u64..10_000, k in 0usize..3) {
        let mut inst = grid(seed, 9, 2, 6);
        inst.drones_per_truck = k;
        let (sol, _) = solve(&inst, &RunConfig::default()).unwrap();
        prop_assert!(validate_solution(&inst, &sol).is_clean());
        for g in &sol.groups {
            let km: f64 = g.truck_route.windows(2).map(|w| inst.network.arc_length(w[0], w[1]).unwrap()).sum();
            prop_assert!(g.cost >= km / inst.truck_speed - 1e-12);
            prop_assert_eq!(timing(&inst, g), timing(&inst, g));
        }
    }

    #[test]
    fn pipeline_ignores_thread_count(seed in 0u64..10_000) {
        let inst = grid(seed, 9, 3, 7);
        let one = solve(&inst, &RunConfig { threads: Some(1), ..RunConfig::default() }).unwrap().0;
        let many = solve(&inst, &RunConfig { threads: Some(3), ..RunConfig::default() }).unwrap().0;
        prop_assert_eq!(one, many);
    }

    #[test]
    fn single_precision_pipeline_tracks_double(seed in 0u64..10_000) {
        let inst = grid(seed, 8, 1, 4);
        let narrow: Instance<f32> = parse_instance(&instance_to_json(&inst), "f32").unwrap();
        let (_, wide) = solve(&inst, &RunConfig::default()).unwrap();
        let (small, narrow_metrics) = solve(&narrow, &RunConfig::default()).unwrap();
        prop_assert!(validate_solution(&narrow, &small).is_clean());
        for (a, b) in wide.groups.iter().zip(&narrow_metrics.groups) {
            prop_assert!((a.set_tour_cost_h - b.set_tour_cost_h).abs() <= 1e-5 * a.set_tour_cost_h.max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn local_search_is_monotone_feasible_and_repeatable(seed in 0u64..10_000, k in 0usize..3) {
        let mut inst = grid(seed, 8, 2, 6);
        inst.drones_per_truck = k;
        let cfg = VnsConfig { seed, no_improve_patience: 10, ..VnsConfig::default() };
        let mut costs = Vec::new();
        let mut clean = true;
        let sol = hc_vns_with(&inst, &cfg, |s| {
            clean &= validate_solution(&inst, s).is_clean();
            costs.push(s.total_cost);
        })
        .unwrap();
        prop_assert!(clean);
        prop_assert!(costs.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*costs.last().unwrap(), sol.total_cost);
        let again = hc_vns_with(&inst, &cfg, |_| {}).unwrap();
        prop_assert_eq!(again, sol);
    }
}
