//! The bipartite problem representation.
//!
//! Messages and clients are 0-indexed throughout, so message `b_1` of the
//! usual 1-indexed notation is message `0` here. Each client stores only its
//! requirement set `R_i`; the side information is the complement.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PliableInstance {
    m: usize,
    requirements: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct InstanceJson {
    m: usize,
    requirements: Vec<Vec<usize>>,
}

impl<'de> Deserialize<'de> for PliableInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = InstanceJson::deserialize(d)?;
        PliableInstance::new(raw.m, raw.requirements).map_err(serde::de::Error::custom)
    }
}

impl PliableInstance {
    /// Validates indices and collapses duplicates within each requirement set.
    pub fn new(m: usize, requirements: Vec<Vec<usize>>) -> Result<Self> {
        let mut requirements = requirements;
        for (client, req) in requirements.iter_mut().enumerate() {
            if let Some(&index) = req.iter().find(|&&j| j >= m) {
                return Err(Error::IndexOutOfRange { client, index, m });
            }
            req.sort_unstable();
            req.dedup();
        }
        Ok(Self { m, requirements })
    }

    /// Each client–message edge is present independently with probability
    /// `p`; the generator is seeded so equal arguments give equal instances.
    pub fn random(n: usize, m: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
        }
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter("n and m must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let requirements = (0..n)
            .map(|_| (0..m).filter(|_| rng.gen_bool(p)).collect())
            .collect();
        Ok(Self { m, requirements })
    }

    /// One client per singleton `{j}` followed by one per pair `{j1, j2}`
    /// in lexicographic order.
    pub fn all_pairs(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter("all-pairs family needs m >= 2".into()));
        }
        let mut requirements: Vec<Vec<usize>> = (0..m).map(|j| vec![j]).collect();
        for a in 0..m {
            for b in a + 1..m {
                requirements.push(vec![a, b]);
            }
        }
        Ok(Self { m, requirements })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.requirements.len()
    }

    pub fn requirements(&self) -> &[Vec<usize>] {
        &self.requirements
    }

    pub fn requirement(&self, client: usize) -> &[usize] {
        &self.requirements[client]
    }

    pub fn side_information(&self, client: usize) -> Vec<usize> {
        let req = self.requirement(client);
        (0..self.m).filter(|j| req.binary_search(j).is_err()).collect()
    }

    pub fn is_vacuous(&self, client: usize) -> bool {
        self.requirements[client].is_empty()
    }

    pub fn non_vacuous(&self) -> usize {
        self.requirements.iter().filter(|r| !r.is_empty()).count()
    }

    pub fn edge_count(&self) -> usize {
        self.requirements.iter().map(Vec::len).sum()
    }

    pub fn neighbors(&self, j: usize) -> Result<Vec<usize>> {
        if j >= self.m {
            return Err(Error::OutOfRange { index: j, limit: self.m });
        }
        Ok((0..self.n())
            .filter(|&i| self.requirements[i].binary_search(&j).is_ok())
            .collect())
    }

    /// `N[j]` for every message at once.
    pub fn neighbor_lists(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.m];
        for (i, req) in self.requirements.iter().enumerate() {
            for &j in req {
                lists[j].push(i);
            }
        }
        lists
    }

    pub fn active_set(&self) -> ActiveSet {
        ActiveSet((0..self.n()).filter(|&i| !self.is_vacuous(i)).collect())
    }

    /// Plain-text form: a header line `m n`, then one line per client listing
    /// its required messages (an empty line is an empty set).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.m, self.n());
        for req in &self.requirements {
            let line: Vec<String> = req.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [m, n] = nums[..] else {
            return Err(Error::Parse(format!("header must be `m n`, got {header:?}")));
        };
        let mut requirements = Vec::with_capacity(n);
        for (k, line) in lines.by_ref().take(n).enumerate() {
            let req = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("client {k}: bad index {t:?}")))
                })
                .collect::<Result<Vec<usize>>>()?;
            requirements.push(req);
        }
        // A final empty client has no trailing line after `lines()` strips it.
        while requirements.len() < n {
            requirements.push(Vec::new());
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse(format!("more than {n} client lines")));
        }
        Self::new(m, requirements)
    }
}

/// Clients still waiting to be satisfied, ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActiveSet(Vec<usize>);

impl ActiveSet {
    pub fn from_clients(mut clients: Vec<usize>) -> Self {
        clients.sort_unstable();
        clients.dedup();
        Self(clients)
    }

    pub fn clients(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, client: usize) -> bool {
        self.0.binary_search(&client).is_ok()
    }

    /// Drops every client in `done` (which must be sorted).
    pub fn remove_sorted(&mut self, done: &[usize]) {
        self.0.retain(|i| done.binary_search(i).is_err());
    }
}

/// Reference instances used in the documentation, tests and CLI.
pub mod fixtures {
    use super::PliableInstance;
    use crate::field::{FMatrix, Field};

    /// The 3-message, 7-client bipartite example: `R_1 = {b_1}`,
    /// `R_4 = {b_1, b_2}`, and under the order `b_1, b_2, b_3` the effective
    /// clients are `{1,4,5,7}`, `{2,6}`, `{3}` (1-indexed).
    pub fn seven_clients() -> PliableInstance {
        PliableInstance::new(
            3,
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0], vec![1], vec![0]],
        )
        .expect("fixture is valid")
    }

    /// The code `x = (b1+b2+b3, b2+b3, b1+b2)` for [`seven_clients`].
    pub fn three_row_code() -> FMatrix {
        FMatrix::from_rows(
            Field::binary(),
            &[vec![1, 1, 1], vec![0, 1, 1], vec![1, 1, 0]],
            3,
        )
        .expect("fixture is valid")
    }

    /// The length-2 ternary code `(b1+b2+b4, b2+b3+2b4)` for the 4-message
    /// all-pairs instance.
    pub fn ternary_all_pairs_code() -> FMatrix {
        FMatrix::from_rows(
            Field::new(3).expect("3 is prime"),
            &[vec![1, 1, 0, 1], vec![0, 1, 1, 2]],
            4,
        )
        .expect("fixture is valid")
    }
}
