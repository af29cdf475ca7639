//! 0-1 integer linear programs: model container, exact branch-and-bound
//! solver and CPLEX LP text import/export.

mod lp_format;
mod search;
mod simplex;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use lp_format::{export_lp, parse_lp};
pub use search::{lp_relaxation_bound, solve, BoundMode, SolveOptions, SolveOutcome, SolveStats, SolveStatus};

#[derive(Debug, Error, PartialEq)]
pub enum IlpError {
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("lp parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn holds(self, lhs: f64, rhs: f64) -> bool {
        const TOL: f64 = 1e-9;
        match self {
            Relation::Le => lhs <= rhs + TOL,
            Relation::Ge => lhs >= rhs - TOL,
            Relation::Eq => (lhs - rhs).abs() <= TOL,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn holds(&self, x: &[bool]) -> bool {
        let lhs: f64 = self.terms.iter().filter(|(v, _)| x[v.0]).map(|&(_, a)| a).sum();
        self.relation.holds(lhs, self.rhs)
    }
}

/// A maximization problem over named binary variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IlpModel {
    names: Vec<String>,
    index: HashMap<String, VarId>,
    objective: Vec<(VarId, f64)>,
    constraints: Vec<Constraint>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || "_.[]".contains(c))
}

impl IlpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, IlpError> {
        let name = name.into();
        if !valid_name(&name) {
            return Err(IlpError::MalformedModel(format!("invalid variable name `{name}`")));
        }
        if self.index.contains_key(&name) {
            return Err(IlpError::MalformedModel(format!("duplicate variable `{name}`")));
        }
        let id = VarId(self.names.len());
        self.index.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, f64)>) -> Result<(), IlpError> {
        self.check_terms("objective", &terms)?;
        self.objective = terms;
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<(), IlpError> {
        let name = name.into();
        if !name.is_empty() && !valid_name(&name) {
            return Err(IlpError::MalformedModel(format!("invalid constraint name `{name}`")));
        }
        self.check_terms(&name, &terms)?;
        if !rhs.is_finite() {
            return Err(IlpError::MalformedModel(format!("constraint `{name}` has a non-finite rhs")));
        }
        self.constraints.push(Constraint { name, terms, relation, rhs });
        Ok(())
    }

    fn check_terms(&self, what: &str, terms: &[(VarId, f64)]) -> Result<(), IlpError> {
        for &(v, a) in terms {
            if v.0 >= self.names.len() {
                return Err(IlpError::MalformedModel(format!("`{what}` references undeclared variable #{}", v.0)));
            }
            if !a.is_finite() {
                return Err(IlpError::MalformedModel(format!("`{what}` has a non-finite coefficient")));
            }
        }
        Ok(())
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Dense objective coefficients, one per variable.
    pub fn objective_dense(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.num_vars()];
        for &(v, a) in &self.objective {
            c[v.0] += a;
        }
        c
    }

    pub fn objective_value(&self, x: &[bool]) -> f64 {
        self.objective.iter().filter(|(v, _)| x[v.0]).map(|&(_, a)| a).sum()
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        x.len() == self.num_vars() && self.constraints.iter().all(|c| c.holds(x))
    }

    /// Re-checks the invariants; models built through the public API always pass.
    pub fn validate(&self) -> Result<(), IlpError> {
        self.check_terms("objective", &self.objective)?;
        for c in &self.constraints {
            self.check_terms(&c.name, &c.terms)?;
        }
        Ok(())
    }
}
