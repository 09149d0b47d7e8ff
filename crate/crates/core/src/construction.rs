//! Parity-check matrix generators: progressive edge growth and small fixtures.

use std::collections::VecDeque;

use thiserror::Error;

use crate::code::{CodeError, DegreeProfile, ParityCheckMatrix};
use crate::rng::CounterRng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("invalid construction spec: {0}")]
    InvalidSpec(String),
    #[error("variable node {var} cannot receive degree {degree} with only {m} check nodes")]
    InfeasibleSpec { var: usize, degree: usize, m: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Size, per-variable degrees and seed for a PEG construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub n: usize,
    pub m: usize,
    pub var_degrees: Vec<usize>,
    pub seed: u64,
}

impl ConstructionSpec {
    pub fn regular(n: usize, m: usize, dv: usize, seed: u64) -> Self {
        Self { n, m, var_degrees: vec![dv; n], seed }
    }

    /// Realizes the node-perspective degree sequence of `profile` on `n`
    /// variable nodes by largest-remainder rounding. Degrees are listed in
    /// ascending order, so low-degree columns come first.
    pub fn from_profile(profile: &DegreeProfile, n: usize, m: usize, seed: u64) -> Self {
        let fractions = profile.variable_node_fractions();
        let exact: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
        let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let short = n - counts.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        // largest remainder first; lower degree wins exact ties
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &k in order.iter().take(short) {
            counts[k] += 1;
        }
        let var_degrees =
            counts.iter().enumerate().flat_map(|(k, &c)| std::iter::repeat_n(k + 1, c)).collect();
        Self { n, m, var_degrees, seed }
    }

    fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |s: String| Err(ConstructionError::InvalidSpec(s));
        if self.m == 0 || self.n <= self.m {
            return bad(format!("need n > m >= 1, got n={} m={}", self.n, self.m));
        }
        if self.var_degrees.len() != self.n {
            return bad(format!("{} degrees given for {} variables", self.var_degrees.len(), self.n));
        }
        if self.var_degrees.contains(&0) {
            return bad("every variable degree must be at least 1".into());
        }
        if self.var_degrees.iter().sum::<usize>() < self.m {
            return bad("too few edges to reach every check node".into());
        }
        Ok(())
    }
}

/// Progressive edge growth.
///
/// Variables are processed in index order and receive their edges one at a
/// time. Each new edge goes to a check node as far as possible from the
/// variable in the current graph (unreachable checks first). Among those,
/// the lowest current check degree wins, and remaining ties are broken
/// uniformly at random by the seeded stream over the index-sorted candidates.
pub fn peg_construct(spec: &ConstructionSpec) -> Result<ParityCheckMatrix, ConstructionError> {
    spec.validate()?;
    let (n, m) = (spec.n, spec.m);
    let mut rng = CounterRng::new(spec.seed);
    let mut check_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dist = vec![usize::MAX; m];
    let mut var_depth = vec![usize::MAX; n];
    let mut queue = VecDeque::new();

    for (j, &degree) in spec.var_degrees.iter().enumerate() {
        if degree > m {
            return Err(ConstructionError::InfeasibleSpec { var: j, degree, m });
        }
        for _ in 0..degree {
            // BFS from variable j over the current graph, recording check depth.
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            var_depth.iter_mut().for_each(|d| *d = usize::MAX);
            queue.clear();
            var_depth[j] = 0;
            queue.push_back(j);
            while let Some(v) = queue.pop_front() {
                for &c in &var_adj[v] {
                    if dist[c] != usize::MAX {
                        continue;
                    }
                    dist[c] = var_depth[v] + 1;
                    for &u in &check_adj[c] {
                        if var_depth[u] == usize::MAX {
                            var_depth[u] = dist[c] + 1;
                            queue.push_back(u);
                        }
                    }
                }
            }
            let farthest = (0..m)
                .filter(|&c| !var_adj[j].contains(&c))
                .map(|c| dist[c])
                .max()
                .ok_or(ConstructionError::InfeasibleSpec { var: j, degree, m })?;
            let min_deg = (0..m)
                .filter(|&c| dist[c] == farthest && !var_adj[j].contains(&c))
                .map(|c| check_adj[c].len())
                .min()
                .expect("farthest set is non-empty");
            let candidates: Vec<usize> = (0..m)
                .filter(|&c| dist[c] == farthest && !var_adj[j].contains(&c) && check_adj[c].len() == min_deg)
                .collect();
            let pick = candidates[rng.below(candidates.len() as u64) as usize];
            check_adj[pick].push(j);
            var_adj[j].push(pick);
        }
    }
    Ok(ParityCheckMatrix::from_rows(n, check_adj)?)
}

/// A fixed cycle-free Tanner graph with 3 checks and 7 variables.
///
/// Check degrees are 4, 3 and 2, so both parities of check degree occur.
pub fn fixture_tree_code() -> ParityCheckMatrix {
    ParityCheckMatrix::from_rows(7, vec![vec![0, 1, 2, 3], vec![3, 4, 5], vec![5, 6]])
        .expect("fixture is valid")
}

/// Complete bipartite graph with `a` checks and `b` variables.
pub fn fixture_complete_bipartite(a: usize, b: usize) -> ParityCheckMatrix {
    assert!(a >= 2 && b >= 2, "complete bipartite fixture needs a, b >= 2");
    ParityCheckMatrix::from_rows(b, vec![(0..b).collect(); a]).expect("fixture is valid")
}

/// The (7,4) Hamming code.
pub fn fixture_hamming_7_4() -> ParityCheckMatrix {
    ParityCheckMatrix::from_dense(&[
        [1u8, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ])
    .expect("fixture is valid")
}
