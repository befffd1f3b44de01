#![allow(dead_code)]

use dcmndp_core::{Commodity, Edge, FacilityOption, Instance};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Connected simple graph on `n` nodes with `m` edges, `levels` facilities
/// per edge and `k` commodities between random distinct node pairs.
pub fn small_instance(rng: &mut ChaCha8Rng, n: usize, m: usize, levels: usize, k: usize) -> Instance {
    let max_edges = n * (n - 1) / 2;
    let m = m.clamp(n - 1, max_edges);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        let p = order[rng.gen_range(0..i)];
        pairs.push((order[i].min(p), order[i].max(p)));
    }
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|p| !pairs.contains(p))
        .collect();
    rest.shuffle(rng);
    pairs.extend(rest.into_iter().take(m - (n - 1)));

    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (u, v))| {
            let mut cap = rng.gen_range(5..=20u64);
            let mut cost = rng.gen_range(5..=40u64);
            let facilities = (0..levels)
                .map(|_| {
                    let f = FacilityOption::new(cap, cost);
                    cap += rng.gen_range(5..=20);
                    cost += rng.gen_range(1..=20);
                    f
                })
                .collect();
            Edge { id, u, v, facilities }
        })
        .collect();
    let commodities = if n < 2 {
        Vec::new()
    } else {
        (0..k)
            .map(|id| {
                let s = rng.gen_range(0..n);
                let mut t = rng.gen_range(0..n - 1);
                if t >= s {
                    t += 1;
                }
                Commodity { id, source: s, sink: t, demand: rng.gen_range(1..=15) }
            })
            .collect()
    };
    Instance { name: "small".into(), node_count: n, edges, commodities }
}

/// Multipliers on a scale where reduced costs take both signs.
pub fn multipliers(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Vec<f64> {
    (0..m)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..scale) })
        .collect()
}
