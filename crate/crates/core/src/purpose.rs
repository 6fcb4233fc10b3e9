//! Purpose DAGs, purpose sets, hierarchy ranks and the two ways of splitting a
//! purpose set into high- and low-hierarchy parts.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PurposeError {
    #[error("unknown purpose `{0}`")]
    UnknownPurpose(String),
    #[error("duplicate purpose `{0}`")]
    DuplicatePurpose(String),
    #[error("purpose graph contains a cycle through `{0}`")]
    Cycle(String),
    #[error("purpose graph has no root")]
    NoRoot,
    #[error("purpose set is empty")]
    EmptySet,
    #[error("purpose graph has no hierarchy line")]
    MissingHierarchyLine,
    #[error("bound must be at least 1, got {0}")]
    BadBound(usize),
}

/// An unordered collection of purpose names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PurposeSet(BTreeSet<String>);

impl PurposeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, p: impl Into<String>) -> bool {
        self.0.insert(p.into())
    }

    pub fn contains(&self, p: &str) -> bool {
        self.0.contains(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn is_subset(&self, other: &PurposeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &PurposeSet) -> PurposeSet {
        PurposeSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &PurposeSet) -> PurposeSet {
        PurposeSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &PurposeSet) -> PurposeSet {
        PurposeSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn symmetric_difference(&self, other: &PurposeSet) -> PurposeSet {
        PurposeSet(self.0.symmetric_difference(&other.0).cloned().collect())
    }

    pub fn as_btree(&self) -> &BTreeSet<String> {
        &self.0
    }
}

impl<S: Into<String>> FromIterator<S> for PurposeSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        PurposeSet(iter.into_iter().map(Into::into).collect())
    }
}

impl<'a> IntoIterator for &'a PurposeSet {
    type Item = &'a String;
    type IntoIter = std::collections::btree_set::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for PurposeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(p)?;
        }
        f.write_str("}")
    }
}

#[macro_export]
macro_rules! pset {
    () => { $crate::purpose::PurposeSet::new() };
    ($($p:expr),+ $(,)?) => { [$($p),+].into_iter().collect::<$crate::purpose::PurposeSet>() };
}

/// A purpose set split into high- and low-hierarchy parts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Split {
    pub high: PurposeSet,
    pub low: PurposeSet,
}

/// Directed acyclic graph of purposes, edges from general to specific.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PurposeGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    ranks: Vec<usize>,
    hierarchy_line: Option<usize>,
}

impl PurposeGraph {
    pub fn new<P, E, S>(purposes: P, edges: E, hierarchy_line: Option<usize>) -> Result<Self, PurposeError>
    where
        P: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut names = Vec::new();
        let mut index = HashMap::new();
        for p in purposes {
            let p = p.as_ref().to_string();
            if index.insert(p.clone(), names.len()).is_some() {
                return Err(PurposeError::DuplicatePurpose(p));
            }
            names.push(p);
        }
        let n = names.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (parent, child) in edges {
            let look = |s: &str| index.get(s).copied().ok_or_else(|| PurposeError::UnknownPurpose(s.to_string()));
            let (u, v) = (look(parent.as_ref())?, look(child.as_ref())?);
            if !children[u].contains(&v) {
                children[u].push(v);
                parents[v].push(u);
            }
        }
        if n > 0 && parents.iter().all(|p| !p.is_empty()) {
            return Err(PurposeError::NoRoot);
        }

        // Longest-path ranks over a topological order.
        let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut ranks = vec![0usize; n];
        let mut seen = 0;
        while let Some(u) = queue.pop_front() {
            seen += 1;
            for &v in &children[u] {
                ranks[v] = ranks[v].max(ranks[u] + 1);
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if seen != n {
            let stuck = indeg.iter().position(|&d| d > 0).unwrap_or(0);
            return Err(PurposeError::Cycle(names[stuck].clone()));
        }

        Ok(PurposeGraph {
            names,
            index,
            parents,
            children,
            ranks,
            hierarchy_line,
        })
    }

    pub fn purposes(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, p: &str) -> bool {
        self.index.contains_key(p)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.children.iter().enumerate().flat_map(move |(u, cs)| {
            cs.iter().map(move |&v| (self.names[u].as_str(), self.names[v].as_str()))
        })
    }

    pub fn hierarchy_line(&self) -> Option<usize> {
        self.hierarchy_line
    }

    pub fn with_hierarchy_line(mut self, line: Option<usize>) -> Self {
        self.hierarchy_line = line;
        self
    }

    pub fn roots(&self) -> impl Iterator<Item = &str> {
        (0..self.names.len())
            .filter(|&i| self.parents[i].is_empty())
            .map(|i| self.names[i].as_str())
    }

    fn idx(&self, p: &str) -> Result<usize, PurposeError> {
        self.index
            .get(p)
            .copied()
            .ok_or_else(|| PurposeError::UnknownPurpose(p.to_string()))
    }

    /// Every member of `s` must be a purpose of this graph.
    pub fn check_set(&self, s: &PurposeSet) -> Result<(), PurposeError> {
        s.iter().try_for_each(|p| self.idx(p).map(drop))
    }

    fn reach(&self, start: usize, adj: &[Vec<usize>]) -> Vec<usize> {
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![start];
        let mut out = Vec::new();
        seen[start] = true;
        while let Some(u) = stack.pop() {
            out.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        out
    }

    fn to_set(&self, idxs: impl IntoIterator<Item = usize>) -> PurposeSet {
        idxs.into_iter().map(|i| self.names[i].clone()).collect()
    }

    /// `p` and all of its ancestors.
    pub fn ancestors(&self, p: &str) -> Result<PurposeSet, PurposeError> {
        let i = self.idx(p)?;
        Ok(self.to_set(self.reach(i, &self.parents)))
    }

    /// `p` and all of its descendants.
    pub fn descendants(&self, p: &str) -> Result<PurposeSet, PurposeError> {
        let i = self.idx(p)?;
        Ok(self.to_set(self.reach(i, &self.children)))
    }

    /// The `levels` nearest ancestry layers counting `p`'s own layer:
    /// ancestors whose rank is within `levels - 1` of `p`'s.
    pub fn partial_ancestors(&self, p: &str, levels: usize) -> Result<PurposeSet, PurposeError> {
        if levels == 0 {
            return Err(PurposeError::BadBound(levels));
        }
        let i = self.idx(p)?;
        let top = self.ranks[i];
        Ok(self.to_set(
            self.reach(i, &self.parents)
                .into_iter()
                .filter(|&a| top - self.ranks[a] < levels),
        ))
    }

    /// Dual of [`PurposeGraph::partial_ancestors`].
    pub fn partial_descendants(&self, p: &str, levels: usize) -> Result<PurposeSet, PurposeError> {
        if levels == 0 {
            return Err(PurposeError::BadBound(levels));
        }
        let i = self.idx(p)?;
        let base = self.ranks[i];
        Ok(self.to_set(
            self.reach(i, &self.children)
                .into_iter()
                .filter(|&d| self.ranks[d] - base < levels),
        ))
    }

    /// `p↕` with optional bounds. Here `up` and `down` count layers beyond
    /// `p` itself, so `Record↕¹₂` reaches one layer up and two layers down.
    pub fn updown(&self, p: &str, up: Option<usize>, down: Option<usize>) -> Result<PurposeSet, PurposeError> {
        let ups = match up {
            Some(a) => self.partial_ancestors(p, a + 1)?,
            None => self.ancestors(p)?,
        };
        let downs = match down {
            Some(b) => self.partial_descendants(p, b + 1)?,
            None => self.descendants(p)?,
        };
        Ok(ups.union(&downs))
    }

    /// Longest-path distance from a root.
    pub fn rank_of(&self, p: &str) -> Result<usize, PurposeError> {
        self.idx(p).map(|i| self.ranks[i])
    }

    fn extreme(&self, s: &PurposeSet, highest: bool) -> Result<(usize, String), PurposeError> {
        let mut best: Option<(usize, &str)> = None;
        for p in s.iter() {
            let r = self.rank_of(p)?;
            let better = match best {
                None => true,
                Some((br, _)) => (highest && r < br) || (!highest && r > br),
            };
            if better {
                best = Some((r, p));
            }
        }
        best.map(|(r, p)| (r, p.to_string())).ok_or(PurposeError::EmptySet)
    }

    /// The member closest to a root (smallest rank). Ties go to the
    /// lexicographically first name.
    pub fn max_hierarchy(&self, s: &PurposeSet) -> Result<String, PurposeError> {
        self.extreme(s, true).map(|(_, p)| p)
    }

    /// The deepest member (largest rank).
    pub fn min_hierarchy(&self, s: &PurposeSet) -> Result<String, PurposeError> {
        self.extreme(s, false).map(|(_, p)| p)
    }

    pub(crate) fn max_rank_in(&self, s: &PurposeSet) -> Result<usize, PurposeError> {
        self.extreme(s, true).map(|(r, _)| r)
    }

    pub(crate) fn min_rank_in(&self, s: &PurposeSet) -> Result<usize, PurposeError> {
        self.extreme(s, false).map(|(r, _)| r)
    }

    /// Splits by the graph's fixed hierarchy line: members ranked at or
    /// above the line are high, the rest low.
    pub fn split_static(&self, s: &PurposeSet) -> Result<Split, PurposeError> {
        let line = self.hierarchy_line.ok_or(PurposeError::MissingHierarchyLine)?;
        self.split_by(s, |r| r <= line)
    }

    /// Splits two sets by their central purposes. The deeper central fixes
    /// the parting row; that row and everything below it is high.
    pub fn split_central(
        &self,
        s_i: &PurposeSet,
        central_i: &str,
        s_j: &PurposeSet,
        central_j: &str,
    ) -> Result<(Split, Split), PurposeError> {
        let parting = self.rank_of(central_i)?.max(self.rank_of(central_j)?);
        Ok((
            self.split_by(s_i, |r| r >= parting)?,
            self.split_by(s_j, |r| r >= parting)?,
        ))
    }

    fn split_by(&self, s: &PurposeSet, is_high: impl Fn(usize) -> bool) -> Result<Split, PurposeError> {
        let mut split = Split::default();
        for p in s.iter() {
            if is_high(self.rank_of(p)?) {
                split.high.insert(p);
            } else {
                split.low.insert(p);
            }
        }
        Ok(split)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::purpose_dag;

    #[test]
    fn ancestors_examples() {
        let pg = purpose_dag();
        assert_eq!(
            pg.ancestors("Analysis").unwrap(),
            pset!["Analysis", "Record", "Admin", "General Purpose"]
        );
        assert_eq!(pg.ancestors("General Purpose").unwrap(), pset!["General Purpose"]);
        for p in pg.purposes() {
            assert!(pg.ancestors(p).unwrap().contains(p));
        }
        assert!(matches!(pg.ancestors("Nope"), Err(PurposeError::UnknownPurpose(_))));
    }

    #[test]
    fn partial_ancestors_examples() {
        let pg = purpose_dag();
        assert_eq!(
            pg.partial_ancestors("Analysis", 3).unwrap(),
            pset!["Analysis", "Record", "Admin"]
        );
        assert_eq!(pg.partial_ancestors("Analysis", 1).unwrap(), pset!["Analysis"]);
        assert_eq!(pg.partial_ancestors("Analysis", 10).unwrap(), pg.ancestors("Analysis").unwrap());
        assert_eq!(pg.partial_ancestors("Analysis", 0), Err(PurposeError::BadBound(0)));
    }

    #[test]
    fn descendant_examples() {
        let pg = purpose_dag();
        assert_eq!(
            pg.descendants("Admin").unwrap(),
            pset!["Admin", "Audit", "Record", "Analysis", "Service-Maintain", "Service-Offers"]
        );
        assert_eq!(pg.partial_descendants("Admin", 3).unwrap(), pset!["Admin", "Record", "Analysis"]);
        assert_eq!(pg.descendants("Audit").unwrap(), pset!["Audit"]);
    }

    #[test]
    fn updown_examples() {
        let pg = purpose_dag();
        assert_eq!(
            pg.updown("Record", None, None).unwrap(),
            pset!["General Purpose", "Admin", "Record", "Analysis", "Service-Maintain", "Service-Offers"]
        );
        assert_eq!(
            pg.updown("Record", Some(1), Some(2)).unwrap(),
            pset!["Admin", "Record", "Analysis", "Service-Maintain", "Service-Offers"]
        );
        assert_eq!(
            pg.updown("Marketing", Some(1), Some(4)).unwrap(),
            pset![
                "General Purpose",
                "Marketing",
                "Direct-use",
                "D-Email",
                "D-Phone",
                "Service-Offers",
                "Service-Updates"
            ]
        );
        let lonely = PurposeGraph::new(["solo"], Vec::<(&str, &str)>::new(), None).unwrap();
        assert_eq!(lonely.updown("solo", None, None).unwrap(), pset!["solo"]);
    }

    #[test]
    fn ranks_and_hierarchy_extremes() {
        let pg = purpose_dag();
        assert_eq!(pg.rank_of("General Purpose").unwrap(), 0);
        assert_eq!(pg.max_hierarchy(&pset!["Analysis", "Record", "Admin"]).unwrap(), "Admin");
        assert_eq!(pg.min_hierarchy(&pset!["Analysis", "Record", "Admin"]).unwrap(), "Analysis");
        assert_eq!(pg.max_hierarchy(&PurposeSet::new()), Err(PurposeError::EmptySet));
        // Record sits one row deeper than Education; it fixes the parting line.
        assert!(pg.rank_of("Record").unwrap() > pg.rank_of("Education").unwrap());
    }

    #[test]
    fn static_split_example() {
        let pg = purpose_dag();
        let s = pg.updown("Record", Some(1), Some(2)).unwrap();
        let split = pg.split_static(&s).unwrap();
        assert_eq!(split.high, pset!["Admin", "Record"]);
        assert_eq!(split.low, pset!["Analysis", "Service-Maintain", "Service-Offers"]);
        assert_eq!(pg.split_static(&PurposeSet::new()).unwrap(), Split::default());
        let wide = pg.clone().with_hierarchy_line(Some(100));
        assert_eq!(wide.split_static(&s).unwrap().high, s);
        let none = pg.with_hierarchy_line(None);
        assert_eq!(none.split_static(&s), Err(PurposeError::MissingHierarchyLine));
    }

    #[test]
    fn central_split_example() {
        let pg = purpose_dag();
        let record = pg.updown("Record", Some(1), Some(2)).unwrap();
        let education = pg.updown("Education", None, None).unwrap();
        assert_eq!(
            education,
            pset!["Optimise", "AI", "Research", "Study", "Education", "General Purpose"]
        );
        let (_, e) = pg.split_central(&record, "Record", &education, "Education").unwrap();
        assert_eq!(e.high, pset!["Optimise", "AI", "Research"]);
        assert_eq!(e.low, pset!["Study", "Education", "General Purpose"]);

        let (a, b) = pg.split_central(&record, "Record", &record, "Record").unwrap();
        assert_eq!(a, b);

        let (all, _) = pg
            .split_central(&education, "General Purpose", &record, "Study")
            .unwrap();
        assert_eq!(all.high, education);
        assert!(all.low.is_empty());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            PurposeGraph::new(["a", "b"], [("a", "b"), ("b", "a")], None),
            Err(PurposeError::NoRoot)
        );
        assert!(matches!(
            PurposeGraph::new(["r", "a", "b"], [("r", "a"), ("a", "b"), ("b", "a")], None),
            Err(PurposeError::Cycle(_))
        ));
        assert_eq!(
            PurposeGraph::new(["a"], [("a", "zz")], None),
            Err(PurposeError::UnknownPurpose("zz".into()))
        );
        assert_eq!(
            PurposeGraph::new(["a", "a"], Vec::<(&str, &str)>::new(), None),
            Err(PurposeError::DuplicatePurpose("a".into()))
        );
    }
}
