//! Exact balanced transportation problems with integer data.
//!
//! Solved as min-cost flow by successive shortest augmenting paths. Costs and
//! masses are integers, so the optimum is exact.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportPlan {
    pub cost: i64,
    /// `flow[a][b]`: mass moved from source `a` to sink `b`.
    pub flow: Vec<Vec<u64>>,
}

/// Minimizes `sum cost[a][b] * flow[a][b]` subject to row sums `supply` and
/// column sums `demand`.
///
/// # Panics
/// If the totals differ or `cost` is not `supply.len() x demand.len()`.
pub fn min_cost_transport(supply: &[u64], demand: &[u64], cost: &[Vec<i64>]) -> TransportPlan {
    let (n, m) = (supply.len(), demand.len());
    assert_eq!(supply.iter().sum::<u64>(), demand.iter().sum::<u64>(), "unbalanced transport problem");
    assert!(cost.len() == n && cost.iter().all(|r| r.len() == m), "cost matrix shape");

    let mut rem_supply = supply.to_vec();
    let mut rem_demand = demand.to_vec();
    let mut flow = vec![vec![0u64; m]; n];
    const INF: i64 = i64::MAX / 4;

    loop {
        // Bellman-Ford from a virtual source over sources with remaining supply.
        let mut dist_a = vec![INF; n];
        let mut dist_b = vec![INF; m];
        let mut parent_a = vec![usize::MAX; n]; // sink node we came from, MAX = source
        let mut parent_b = vec![usize::MAX; m];
        for a in 0..n {
            if rem_supply[a] > 0 {
                dist_a[a] = 0;
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                if dist_a[a] == INF {
                    continue;
                }
                for b in 0..m {
                    let d = dist_a[a] + cost[a][b];
                    if d < dist_b[b] {
                        dist_b[b] = d;
                        parent_b[b] = a;
                        changed = true;
                    }
                }
            }
            for b in 0..m {
                if dist_b[b] == INF {
                    continue;
                }
                for a in 0..n {
                    if flow[a][b] > 0 {
                        let d = dist_b[b] - cost[a][b];
                        if d < dist_a[a] {
                            dist_a[a] = d;
                            parent_a[a] = b;
                            changed = true;
                        }
                    }
                }
            }
        }

        let Some(end) = (0..m).filter(|&b| rem_demand[b] > 0 && dist_b[b] < INF).min_by_key(|&b| dist_b[b])
        else {
            break;
        };

        // Walk back to find the bottleneck.
        let mut bottleneck = rem_demand[end];
        let mut b = end;
        let start = loop {
            let a = parent_b[b];
            match parent_a[a] {
                usize::MAX => break a,
                prev_b => {
                    bottleneck = bottleneck.min(flow[a][prev_b]);
                    b = prev_b;
                }
            }
        };
        bottleneck = bottleneck.min(rem_supply[start]);

        let mut b = end;
        loop {
            let a = parent_b[b];
            flow[a][b] += bottleneck;
            match parent_a[a] {
                usize::MAX => break,
                prev_b => {
                    flow[a][prev_b] -= bottleneck;
                    b = prev_b;
                }
            }
        }
        rem_supply[start] -= bottleneck;
        rem_demand[end] -= bottleneck;
    }

    debug_assert!(rem_demand.iter().all(|&r| r == 0));
    let total = (0..n).flat_map(|a| (0..m).map(move |b| (a, b))).map(|(a, b)| cost[a][b] * flow[a][b] as i64).sum();
    TransportPlan { cost: total, flow }
}
