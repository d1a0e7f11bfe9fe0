//! Disjoint unions of Rips-Segev graphs with a merged coefficient table.

use serde::{Deserialize, Serialize};

use super::coefficients::{check_rs_condition, CoefficientTable, RsCheck};
use super::RsGraph;
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

#[derive(Clone, Debug)]
pub struct RsFamily {
    pub graph: LabeledGraph,
    /// First vertex of each member inside `graph`.
    pub vertex_offsets: Vec<usize>,
    /// First a-line index of each member; line `i` of member `l` becomes
    /// line `i + line_offsets[l]`.
    pub line_offsets: Vec<usize>,
    pub table: CoefficientTable,
    pub check: RsCheck,
    pub member_girths: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyBound {
    pub min_girth: Option<usize>,
    /// The claimed lower bound on γ of the union, `min girth + 2`.
    pub claimed_gamma: Option<usize>,
}

impl RsFamily {
    pub fn num_lines(&self) -> usize {
        self.table.len()
    }

    pub fn bound(&self) -> FamilyBound {
        let min_girth = self.member_girths.iter().flatten().copied().min();
        FamilyBound { min_girth, claimed_gamma: min_girth.map(|g| g + 2) }
    }
}

/// Fails if some member has no coefficient table or the merged table
/// breaks the Rips-Segev condition.
pub fn combine_family(members: &[&RsGraph]) -> Result<RsFamily> {
    if members.is_empty() {
        return Err(Error::Construction("empty family".into()));
    }
    let tables: Vec<&CoefficientTable> = members
        .iter()
        .enumerate()
        .map(|(l, m)| m.coefficients.as_ref().ok_or_else(|| Error::Construction(format!("member {} has no coefficient table", l + 1))))
        .collect::<Result<_>>()?;
    let table = CoefficientTable::merged(&tables);
    let check = check_rs_condition(&table);
    if !check.pass {
        return Err(Error::Construction(format!("merged table fails the Rips-Segev condition: {}", check.reason().unwrap_or_default())));
    }
    let graphs: Vec<&LabeledGraph> = members.iter().map(|m| &m.graph).collect();
    let (graph, vertex_offsets) = LabeledGraph::disjoint_union(&graphs);
    let mut line_offsets = Vec::with_capacity(members.len());
    let mut k = 0;
    for m in members {
        line_offsets.push(k);
        k += m.num_lines();
    }
    let member_girths = members.iter().map(|m| m.phi_girth()).collect();
    Ok(RsFamily { graph, vertex_offsets, line_offsets, table, check, member_girths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rips_segev::{build_gamma, gen_power_coefficients, gen_underlying, label_underlying};

    fn member(n: usize, first: u32, seed: u64) -> RsGraph {
        let phi = gen_underlying(n, 3, seed, 200).unwrap();
        let t = gen_power_coefficients(&(first..first + n as u32).collect::<Vec<_>>()).unwrap();
        build_gamma(&label_underlying(&phi, &t).unwrap()).unwrap()
    }

    #[test]
    fn disjoint_ranges_combine() {
        let (g1, g2) = (member(9, 1, 1), member(10, 10, 2));
        let f = combine_family(&[&g1, &g2]).unwrap();
        assert_eq!(f.num_lines(), 19);
        assert_eq!(f.line_offsets, vec![0, 9]);
        assert_eq!(f.graph.num_vertices(), g1.graph.num_vertices() + g2.graph.num_vertices());
        assert!(f.check.pass);
    }

    #[test]
    fn shared_line_fails() {
        let (g1, g2) = (member(9, 1, 1), member(9, 9, 2));
        assert!(combine_family(&[&g1, &g2]).is_err());
    }

    #[test]
    fn family_of_one_is_the_graph() {
        let g = member(9, 1, 3);
        let f = combine_family(&[&g]).unwrap();
        assert_eq!(f.graph.canonical_form(), g.graph.canonical_form());
        assert_eq!(f.table, *g.coefficients.as_ref().unwrap());
        assert_eq!(f.bound().min_girth, g.phi_girth());
    }
}
