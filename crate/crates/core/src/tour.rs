//! Open tours (no return leg) over asymmetric cost matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest remaining-goal count handled by [`exact_tour`].
pub const EXACT_TOUR_MAX: usize = 15;
/// Group tours switch from exact to greedy above this many remaining goals.
pub const GROUP_EXACT_LIMIT: usize = 10;

/// Square matrix of travel costs; row = from, column = to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("cost matrix must be square".into()));
        }
        let m = Self {
            n,
            data: rows.into_iter().flatten().collect(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.set(i, j, f(i, j));
                }
            }
        }
        m
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Err(Error::Parse(format!("non-zero diagonal at {i}")));
            }
            for j in 0..self.n {
                let c = self.get(i, j);
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::Parse(format!("bad cost {c} at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: f64) {
        self.data[i * self.n + j] = c;
    }

    pub fn path_cost(&self, start: usize, order: &[usize]) -> f64 {
        let mut cur = start;
        let mut total = 0.0;
        for &g in order {
            total += self.get(cur, g);
            cur = g;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub cost: f64,
}

/// Nearest-next ordering from `start`; ties go to the lower index.
pub fn greedy_tour(costs: &CostMatrix, start: usize, remaining: &[usize]) -> Tour {
    let mut left: Vec<usize> = remaining.to_vec();
    left.sort_unstable();
    left.dedup();
    let mut order = Vec::with_capacity(left.len());
    let mut cur = start;
    let mut total = 0.0;
    while !left.is_empty() {
        let (k, &next) = left
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                costs
                    .get(cur, a)
                    .total_cmp(&costs.get(cur, b))
                    .then(a.cmp(&b))
            })
            .unwrap();
        total += costs.get(cur, next);
        order.push(next);
        cur = next;
        left.remove(k);
    }
    Tour { order, cost: total }
}

/// Optimal open tour by Held-Karp dynamic programming over subsets.
pub fn exact_tour(costs: &CostMatrix, start: usize, remaining: &[usize]) -> Result<Tour> {
    let mut goals: Vec<usize> = remaining.to_vec();
    goals.sort_unstable();
    goals.dedup();
    let k = goals.len();
    if k > EXACT_TOUR_MAX {
        return Err(Error::TourTooLarge {
            max: EXACT_TOUR_MAX,
            got: k,
        });
    }
    if k == 0 {
        return Ok(Tour {
            order: vec![],
            cost: 0.0,
        });
    }
    let full = (1usize << k) - 1;
    // best[mask * k + j]: cheapest path from start covering `mask`, ending at goals[j].
    let mut best = vec![f64::INFINITY; (full + 1) * k];
    let mut parent = vec![usize::MAX; (full + 1) * k];
    for j in 0..k {
        best[(1 << j) * k + j] = costs.get(start, goals[j]);
    }
    for mask in 1..=full {
        for j in 0..k {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = best[mask * k + j];
            if !here.is_finite() {
                continue;
            }
            for nx in 0..k {
                if mask & (1 << nx) != 0 {
                    continue;
                }
                let m2 = mask | (1 << nx);
                let c = here + costs.get(goals[j], goals[nx]);
                if c < best[m2 * k + nx] {
                    best[m2 * k + nx] = c;
                    parent[m2 * k + nx] = j;
                }
            }
        }
    }
    let (mut j, cost) = (0..k)
        .map(|j| (j, best[full * k + j]))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .unwrap();
    let mut order = Vec::with_capacity(k);
    let mut mask = full;
    loop {
        order.push(goals[j]);
        let p = parent[mask * k + j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    order.reverse();
    Ok(Tour { order, cost })
}

/// Precomputed suffix costs for open tours over a fixed goal-to-goal matrix.
///
/// `cost_from(g, rest)` is the cheapest open path that starts at goal `g` and
/// visits every goal in the bitmask `rest`. A tour from an arbitrary location
/// then costs one extra leg, which is what group tours in the planner need:
/// many locations, one goal matrix.
#[derive(Debug, Clone)]
pub struct SuffixTours {
    n: usize,
    goal_costs: CostMatrix,
    /// `table[rest * n + g]`; infinite for entries that were skipped.
    table: Vec<f64>,
}

impl SuffixTours {
    /// `goal_costs` is n x n over goals only.
    pub fn new(goal_costs: CostMatrix) -> Self {
        let n = goal_costs.size();
        let size = 1usize << n;
        let mut table = vec![f64::INFINITY; size * n];
        for g in 0..n {
            table[g] = 0.0;
        }
        // Entries with more than GROUP_EXACT_LIMIT - 1 goals in `rest` are never read.
        for rest in 1..size {
            if rest.count_ones() as usize > GROUP_EXACT_LIMIT - 1 {
                continue;
            }
            for g in 0..n {
                if rest & (1 << g) != 0 {
                    continue;
                }
                let mut best = f64::INFINITY;
                for h in 0..n {
                    if rest & (1 << h) == 0 {
                        continue;
                    }
                    let c = goal_costs.get(g, h) + table[(rest & !(1 << h)) * n + h];
                    if c < best {
                        best = c;
                    }
                }
                table[rest * n + g] = best;
            }
        }
        Self {
            n,
            goal_costs,
            table,
        }
    }

    pub fn goal_count(&self) -> usize {
        self.n
    }

    pub fn goal_costs(&self) -> &CostMatrix {
        &self.goal_costs
    }

    /// Tour over the goals in bitmask `remaining`, starting from a location
    /// whose cost to goal `g` is `from_costs[g]`. Exact up to
    /// [`GROUP_EXACT_LIMIT`] goals, greedy above.
    pub fn tour(&self, from_costs: &[f64], remaining: u32) -> Tour {
        let rem = remaining as usize;
        let count = rem.count_ones() as usize;
        if count == 0 {
            return Tour {
                order: vec![],
                cost: 0.0,
            };
        }
        if count > GROUP_EXACT_LIMIT {
            return self.greedy(from_costs, rem);
        }
        let n = self.n;
        let pick = |rest: usize, lead: &dyn Fn(usize) -> f64| {
            (0..n)
                .filter(|&g| rest & (1 << g) != 0)
                .map(|g| (g, lead(g) + self.table[(rest & !(1 << g)) * n + g]))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .unwrap()
        };
        let (first, cost) = pick(rem, &|g| from_costs[g]);
        let mut order = vec![first];
        let mut rest = rem & !(1 << first);
        let mut cur = first;
        while rest != 0 {
            let (next, _) = pick(rest, &|g| self.goal_costs.get(cur, g));
            order.push(next);
            rest &= !(1 << next);
            cur = next;
        }
        Tour { order, cost }
    }

    fn greedy(&self, from_costs: &[f64], rem: usize) -> Tour {
        let mut rest = rem;
        let mut order = Vec::new();
        let mut cost = 0.0;
        let mut cur: Option<usize> = None;
        while rest != 0 {
            let (next, c) = (0..self.n)
                .filter(|&g| rest & (1 << g) != 0)
                .map(|g| (g, cur.map_or(from_costs[g], |c| self.goal_costs.get(c, g))))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .unwrap();
            cost += c;
            order.push(next);
            rest &= !(1 << next);
            cur = Some(next);
        }
        Tour { order, cost }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_single_goal() {
        let m = CostMatrix::from_fn(3, |i, j| (i + 2 * j) as f64);
        let t = greedy_tour(&m, 0, &[2]);
        assert_eq!(t.order, vec![2]);
        assert_eq!(t.cost, m.get(0, 2));
    }

    #[test]
    fn greedy_picks_cheapest_first() {
        let rows = vec![
            vec![0.0, 3.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 1.0],
            vec![1.0, 1.0, 1.0, 0.0],
        ];
        let m = CostMatrix::from_rows(rows).unwrap();
        assert_eq!(greedy_tour(&m, 0, &[1, 2, 3]).order[0], 2);
    }

    #[test]
    fn exact_on_a_line() {
        let xs: [f64; 5] = [0.0, 4.0, 1.0, 3.0, 2.0];
        let m = CostMatrix::from_fn(5, |i, j| (xs[i] - xs[j]).abs());
        let t = exact_tour(&m, 0, &[1, 2, 3, 4]).unwrap();
        assert_eq!(t.order, vec![2, 4, 3, 1]);
        assert_eq!(t.cost, 4.0);
    }

    #[test]
    fn exact_uniform_costs() {
        let m = CostMatrix::from_fn(6, |_, _| 2.5);
        let t = exact_tour(&m, 0, &[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(t.cost, 5.0 * 2.5);
        assert_eq!(t.order.len(), 5);
    }

    #[test]
    fn exact_size_limit() {
        let m = CostMatrix::from_fn(17, |_, _| 1.0);
        let all: Vec<usize> = (1..17).collect();
        assert!(matches!(
            exact_tour(&m, 0, &all),
            Err(Error::TourTooLarge { .. })
        ));
    }

    #[test]
    fn suffix_tours_match_exact() {
        let goal = CostMatrix::from_fn(5, |i, j| ((i * 7 + j * 3) % 5 + 1) as f64);
        let table = SuffixTours::new(goal.clone());
        let from = [4.0, 1.0, 3.0, 2.0, 5.0];
        // Embed "from" as row 5 of a 6x6 matrix and compare against Held-Karp.
        let full = CostMatrix::from_fn(6, |i, j| match (i, j) {
            (5, j) => from[j],
            (_, 5) => 0.0,
            (i, j) => goal.get(i, j),
        });
        for mask in 1u32..32 {
            let rem: Vec<usize> = (0..5).filter(|g| mask & (1 << g) != 0).collect();
            let e = exact_tour(&full, 5, &rem).unwrap();
            let s = table.tour(&from, mask);
            assert!((e.cost - s.cost).abs() < 1e-12);
            assert!((full.path_cost(5, &s.order) - s.cost).abs() < 1e-12);
        }
    }
}
