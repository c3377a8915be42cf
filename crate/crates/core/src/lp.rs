//! Dense two-phase simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! basic variable among ratio ties), which cannot cycle on degenerate
//! problems. Rows are kept dense but pivots only touch the nonzero columns of
//! the pivot row, which keeps sequence-form instances cheap.

use std::fmt::Write as _;

use crate::rational::Rational;

/// Coefficients, relation and right-hand side of one constraint.
type Row = (Vec<(usize, Rational)>, Relation, Rational);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective · x` subject to the constraints; variables are
/// nonnegative unless flagged free.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub free: Vec<bool>,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: Rational,
    pub values: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

impl LinearProgram {
    pub fn add_var(&mut self, name: impl Into<String>, free: bool) -> usize {
        self.names.push(name.into());
        self.free.push(free);
        self.objective.push(Rational::zero());
        self.names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Human-readable dump with every coefficient as an exact `num/den` string.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let term = |out: &mut String, c: &Rational, v: usize| {
            let _ = write!(out, " + {} {}", c, self.names[v]);
        };
        out.push_str("maximize\n ");
        for (v, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                term(&mut out, c, v);
            }
        }
        out.push_str("\nsubject to\n");
        for (i, con) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{i}:");
            for (v, c) in &con.coeffs {
                term(&mut out, c, *v);
            }
            let rel = match con.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " {rel} {}", con.rhs);
        }
        out.push_str("bounds\n");
        for (v, name) in self.names.iter().enumerate() {
            if self.free[v] {
                let _ = writeln!(out, " {name} free");
            } else {
                let _ = writeln!(out, " {name} >= 0/1");
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self).run(self)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Pos(usize),
    Neg(usize),
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut kinds = Vec::new();
        let mut col_of = Vec::with_capacity(lp.num_vars());
        for v in 0..lp.num_vars() {
            col_of.push(kinds.len());
            kinds.push(ColKind::Pos(v));
            if lp.free[v] {
                kinds.push(ColKind::Neg(v));
            }
        }
        let m = lp.constraints.len();
        // Normalize to nonnegative right-hand sides.
        let normalized: Vec<Row> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    let rel = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    let coeffs = c.coeffs.iter().map(|(v, a)| (*v, -a)).collect();
                    (coeffs, rel, -&c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();
        let mut extra = Vec::with_capacity(m);
        for (_, rel, _) in &normalized {
            match rel {
                Relation::Le => extra.push((Some(kinds.len()), None)),
                Relation::Ge => extra.push((Some(kinds.len()), Some(kinds.len() + 1))),
                Relation::Eq => extra.push((None, Some(kinds.len()))),
            }
            match rel {
                Relation::Le => kinds.push(ColKind::Slack),
                Relation::Ge => {
                    kinds.push(ColKind::Slack);
                    kinds.push(ColKind::Artificial);
                }
                Relation::Eq => kinds.push(ColKind::Artificial),
            }
        }
        let n = kinds.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (i, (coeffs, rel, b)) in normalized.into_iter().enumerate() {
            let mut row = vec![Rational::zero(); n];
            for (v, a) in coeffs {
                let c = col_of[v];
                row[c] += &a;
                if lp.free[v] {
                    row[c + 1] -= &a;
                }
            }
            let (slack, art) = extra[i];
            if let Some(s) = slack {
                row[s] = if rel == Relation::Ge { -Rational::one() } else { Rational::one() };
            }
            if let Some(a) = art {
                row[a] = Rational::one();
                basis.push(a);
            } else {
                basis.push(slack.expect("slack for <= row"));
            }
            rows.push(row);
            rhs.push(b);
        }
        Tableau { rows, rhs, basis, kinds, pivots: 0 }
    }

    /// Reduced-cost row for maximizing `cost`: entry j is `-c_j + c_B · column_j`.
    fn reduced_costs(&self, cost: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut red: Vec<Rational> = cost.iter().map(|c| -c).collect();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (r, a) in red.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *r += cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        (red, value)
    }

    fn pivot(&mut self, red: &mut [Rational], value: &mut Rational, r: usize, c: usize) {
        self.pivots += 1;
        let piv = self.rows[r][c].clone();
        if !piv.is_one() {
            let inv = piv.recip();
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a = &*a * &inv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] = &row[j] - &(&f * &prow[j]);
            }
            self.rhs[i] = &self.rhs[i] - &(&f * &prhs);
        }
        let f = red[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                red[j] = &red[j] - &(&f * &prow[j]);
            }
            *value = &*value - &(&f * &prhs);
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    /// Minimum-ratio row for entering column `c`, ties broken by smallest
    /// basic index; `None` if the column is unbounded.
    fn ratio_test(&self, c: usize) -> Option<(usize, Rational)> {
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][c];
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / a;
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best
    }

    /// Maximizes over the current basis; columns with `allowed[j] == false` never enter.
    ///
    /// The entering column is the most negative reduced cost as long as that
    /// step makes progress; any step that would be degenerate is taken by
    /// Bland's rule instead. Cycling needs an unbroken run of degenerate
    /// pivots, and those are all Bland pivots, so it cannot occur.
    fn optimize(&mut self, red: &mut [Rational], value: &mut Rational, allowed: &[bool]) -> Result<(), LpError> {
        loop {
            let mut steepest: Option<usize> = None;
            for j in 0..red.len() {
                if allowed[j] && red[j].is_negative() && steepest.is_none_or(|s| red[j] < red[s]) {
                    steepest = Some(j);
                }
            }
            let Some(c) = steepest else {
                return Ok(());
            };
            let (r, c) = match self.ratio_test(c) {
                None => return Err(LpError::Unbounded),
                Some((r, ratio)) if ratio.is_positive() => (r, c),
                Some(_) => {
                    let c = (0..red.len()).find(|&j| allowed[j] && red[j].is_negative()).expect("steepest exists");
                    match self.ratio_test(c) {
                        None => return Err(LpError::Unbounded),
                        Some((r, _)) => (r, c),
                    }
                }
            };
            self.pivot(red, value, r, c);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        let n = self.kinds.len();
        let has_art = self.kinds.contains(&ColKind::Artificial);
        if has_art {
            let cost: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| if *k == ColKind::Artificial { -Rational::one() } else { Rational::zero() })
                .collect();
            let (mut red, mut value) = self.reduced_costs(&cost);
            let allowed = vec![true; n];
            self.optimize(&mut red, &mut value, &allowed)?;
            if !value.is_zero() {
                return Err(LpError::Infeasible);
            }
            // Drive zero-level artificials out of the basis, dropping redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.kinds[self.basis[i]] == ColKind::Artificial {
                    let col = (0..n).find(|&j| self.kinds[j] != ColKind::Artificial && !self.rows[i][j].is_zero());
                    match col {
                        Some(c) => {
                            let mut dummy_red = vec![Rational::zero(); n];
                            let mut dummy_val = Rational::zero();
                            self.pivot(&mut dummy_red, &mut dummy_val, i, c);
                        }
                        None => {
                            self.rows.remove(i);
                            self.rhs.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
            // Artificial columns can never re-enter; drop them so pivots skip them.
            let keep: Vec<usize> = (0..n).filter(|&j| self.kinds[j] != ColKind::Artificial).collect();
            let mut remap = vec![usize::MAX; n];
            for (new, &old) in keep.iter().enumerate() {
                remap[old] = new;
            }
            for row in &mut self.rows {
                *row = keep.iter().map(|&j| std::mem::take(&mut row[j])).collect();
            }
            self.kinds = keep.iter().map(|&j| self.kinds[j]).collect();
            for b in &mut self.basis {
                *b = remap[*b];
            }
        }
        let cost: Vec<Rational> = self
            .kinds
            .iter()
            .map(|k| match k {
                ColKind::Pos(v) => lp.objective[*v].clone(),
                ColKind::Neg(v) => -&lp.objective[*v],
                _ => Rational::zero(),
            })
            .collect();
        let (mut red, mut value) = self.reduced_costs(&cost);
        let allowed: Vec<bool> = self.kinds.iter().map(|k| *k != ColKind::Artificial).collect();
        self.optimize(&mut red, &mut value, &allowed)?;
        let mut values = vec![Rational::zero(); lp.num_vars()];
        for (i, &b) in self.basis.iter().enumerate() {
            match self.kinds[b] {
                ColKind::Pos(v) => values[v] += &self.rhs[i],
                ColKind::Neg(v) => values[v] -= &self.rhs[i],
                _ => {}
            }
        }
        Ok(LpSolution { objective: value, values, pivots: self.pivots })
    }
}
