use super::PartySystem;
use crate::{Error, Result};
use std::fmt;

/// A partition of the parties into ordered measured groups and a residual group.
///
/// The textual form is `G1:G2:...|R`, where each group is the concatenation of
/// its party labels, e.g. `A:B|CD` or `BCD|A`. Parties inside a group are kept
/// in system order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    measured: Vec<Vec<usize>>,
    residual: Vec<usize>,
    labels: Vec<String>,
}

impl Cut {
    /// Builds a cut from party indices.
    pub fn from_indices(
        system: &PartySystem,
        measured: Vec<Vec<usize>>,
        residual: Vec<usize>,
    ) -> Result<Self> {
        let n = system.num_parties();
        if measured.is_empty() {
            return Err(Error::InvalidCut("at least one measured group is required".into()));
        }
        if residual.is_empty() {
            return Err(Error::InvalidCut("residual group is empty".into()));
        }
        let mut seen = vec![false; n];
        let mut groups = measured;
        let mut residual = residual;
        for group in groups.iter_mut().chain(std::iter::once(&mut residual)) {
            if group.is_empty() {
                return Err(Error::InvalidCut("empty group".into()));
            }
            group.sort_unstable();
            for &p in group.iter() {
                if p >= n {
                    return Err(Error::InvalidCut(format!("party index {p} out of range")));
                }
                if seen[p] {
                    return Err(Error::InvalidCut(format!(
                        "party `{}` appears twice",
                        system.labels()[p]
                    )));
                }
                seen[p] = true;
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidCut(format!(
                "party `{}` is not assigned to any group",
                system.labels()[p]
            )));
        }
        Ok(Self {
            measured: groups,
            residual,
            labels: system.labels().to_vec(),
        })
    }

    /// Builds a cut from label lists.
    pub fn new<S: AsRef<str>>(system: &PartySystem, measured: &[&[S]], residual: &[S]) -> Result<Self> {
        let groups = measured
            .iter()
            .map(|g| g.iter().map(|l| system.index_of(l.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let residual = residual
            .iter()
            .map(|l| system.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(system, groups, residual)
    }

    /// Two-block cut: `measured` against everything else.
    pub fn bipartition<S: AsRef<str>>(system: &PartySystem, measured: &[S]) -> Result<Self> {
        let group = system.indices_of(measured)?;
        let residual = (0..system.num_parties()).filter(|p| !group.contains(p)).collect();
        Self::from_indices(system, vec![group], residual)
    }

    /// Parses `A:B|CD`. Without `|` the residual is every party not measured.
    pub fn parse(system: &PartySystem, text: &str) -> Result<Self> {
        let text = text.trim();
        let (left, right) = match text.split_once('|') {
            Some((l, r)) => {
                if r.contains('|') {
                    return Err(Error::InvalidCut(format!("more than one `|` in `{text}`")));
                }
                (l, Some(r))
            }
            None => (text, None),
        };
        let mut measured = Vec::new();
        for token in left.split(':') {
            if token.trim().is_empty() {
                return Err(Error::InvalidCut(format!("empty group token in `{text}`")));
            }
            measured.push(parse_group(system, token.trim())?);
        }
        let residual = match right {
            Some(r) if r.trim().is_empty() => {
                return Err(Error::InvalidCut(format!("empty residual in `{text}`")));
            }
            Some(r) => parse_group(system, r.trim())?,
            None => (0..system.num_parties())
                .filter(|p| !measured.iter().any(|g| g.contains(p)))
                .collect(),
        };
        Self::from_indices(system, measured, residual)
    }

    pub fn measured_groups(&self) -> &[Vec<usize>] {
        &self.measured
    }

    pub fn residual(&self) -> &[usize] {
        &self.residual
    }

    pub fn num_groups(&self) -> usize {
        self.measured.len()
    }

    pub fn is_two_block(&self) -> bool {
        self.measured.len() == 1
    }

    /// All measured parties, group by group.
    pub fn measured_parties(&self) -> Vec<usize> {
        self.measured.iter().flatten().copied().collect()
    }

    pub fn group_dims(&self, system: &PartySystem) -> Vec<usize> {
        self.measured.iter().map(|g| system.product_dim(g)).collect()
    }

    pub fn residual_dim(&self, system: &PartySystem) -> usize {
        system.product_dim(&self.residual)
    }

    /// Axis order placing the measured groups first and the residual last.
    pub fn axis_order(&self) -> Vec<usize> {
        let mut order = self.measured_parties();
        order.extend_from_slice(&self.residual);
        order
    }

    /// Every cut of `system` up to the order of the measured groups: each
    /// nonempty proper subset of parties, split into groups in every way.
    pub fn all(system: &PartySystem) -> Vec<Cut> {
        let n = system.num_parties();
        let mut out = Vec::new();
        for mask in 1..(1usize << n).saturating_sub(1) {
            let measured: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let residual: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            for groups in set_partitions(&measured) {
                out.push(Cut {
                    measured: groups,
                    residual: residual.clone(),
                    labels: system.labels().to_vec(),
                });
            }
        }
        out
    }

    /// Same cut with every measured party in a single group.
    pub fn grouped(&self) -> Cut {
        Cut {
            measured: vec![self.measured_parties()],
            residual: self.residual.clone(),
            labels: self.labels.clone(),
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        for g in &mut self.measured {
            g.sort_unstable();
        }
        self
    }

    pub(crate) fn check_system(&self, system: &PartySystem) -> Result<()> {
        if self.labels != system.labels() {
            return Err(Error::InvalidCut(format!("cut `{self}` belongs to a different system")));
        }
        Ok(())
    }
}

/// Set partitions with blocks ordered by their first element.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        let mut alone = vec![vec![first]];
        alone.extend(p.iter().cloned());
        out.push(alone);
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            q.sort_by_key(|g| g[0]);
            out.push(q);
        }
    }
    out
}

fn parse_group(system: &PartySystem, token: &str) -> Result<Vec<usize>> {
    let mut rest = token;
    let mut out = Vec::new();
    while !rest.is_empty() {
        let best = system
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, l)| rest.starts_with(l.as_str()))
            .max_by_key(|(_, l)| l.len());
        match best {
            Some((i, l)) => {
                out.push(i);
                rest = &rest[l.len()..];
            }
            None => {
                return Err(Error::InvalidCut(format!(
                    "unknown party in token `{token}` at `{rest}`"
                )))
            }
        }
    }
    Ok(out)
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let group = |g: &[usize]| g.iter().map(|&p| self.labels[p].as_str()).collect::<String>();
        let measured: Vec<String> = self.measured.iter().map(|g| group(g)).collect();
        write!(f, "{}|{}", measured.join(":"), group(&self.residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_cuts() {
        let three = Cut::all(&PartySystem::qubits(3));
        assert_eq!(three.len(), 9);
        assert!(three.contains(&Cut::parse(&PartySystem::qubits(3), "A:B|C").unwrap()));
        let four = Cut::all(&PartySystem::qubits(4));
        assert_eq!(four.len(), 4 + 6 * 2 + 4 * 5);
        let unique: std::collections::HashSet<_> = four.iter().collect();
        assert_eq!(unique.len(), four.len());
    }

    #[test]
    fn parse_and_display() {
        let s = PartySystem::qubits(4);
        let c = Cut::parse(&s, "A:B|CD").unwrap();
        assert_eq!(c.measured_groups(), &[vec![0], vec![1]]);
        assert_eq!(c.residual(), &[2, 3]);
        assert_eq!(c.to_string(), "A:B|CD");
        let g = Cut::parse(&s, "DCB|A").unwrap();
        assert_eq!(g.measured_groups(), &[vec![1, 2, 3]]);
        assert_eq!(g.to_string(), "BCD|A");
        let implicit = Cut::parse(&s, "AB").unwrap();
        assert_eq!(implicit.residual(), &[2, 3]);
    }

    #[test]
    fn malformed_cuts() {
        let s = PartySystem::qubits(3);
        for bad in ["A::B|C", "A:B|", "A:A|BC", "A:B|C|", "A:X|BC", "ABC", "A:B"] {
            let r = Cut::parse(&s, bad);
            if bad == "A:B" {
                // residual inferred as C
                assert!(r.is_ok());
                continue;
            }
            assert!(matches!(r, Err(Error::InvalidCut(_))), "{bad} -> {r:?}");
        }
        assert!(Cut::parse(&s, "A|B").is_err());
    }

    #[test]
    fn multichar_labels() {
        let s = PartySystem::new(vec![3, 3, 3], vec!["A1".into(), "A2".into(), "A3".into()]).unwrap();
        let c = Cut::parse(&s, "A1:A2|A3").unwrap();
        assert_eq!(c.measured_groups(), &[vec![0], vec![1]]);
    }
}
