//! Propositional satisfiability: Tseitin encoding plus a small DPLL solver.

#[derive(Clone, Debug)]
pub(crate) enum Prop {
    Var(usize),
    Const(bool),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

type Lit = i64;

fn lit(var: usize, positive: bool) -> Lit {
    let v = var as i64 + 1;
    if positive {
        v
    } else {
        -v
    }
}

struct Encoder {
    next: usize,
    clauses: Vec<Vec<Lit>>,
}

impl Encoder {
    fn fresh(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }

    /// Returns a literal equivalent to `p`.
    fn encode(&mut self, p: &Prop) -> Lit {
        match p {
            Prop::Var(v) => lit(*v, true),
            Prop::Const(b) => {
                let v = self.fresh();
                self.clauses.push(vec![lit(v, *b)]);
                lit(v, true)
            }
            Prop::Not(q) => -self.encode(q),
            Prop::And(ps) | Prop::Or(ps) => {
                let is_and = matches!(p, Prop::And(_));
                let lits: Vec<Lit> = ps.iter().map(|q| self.encode(q)).collect();
                let v = lit(self.fresh(), true);
                if is_and {
                    // v -> l_i ; (all l_i) -> v
                    for &l in &lits {
                        self.clauses.push(vec![-v, l]);
                    }
                    let mut c: Vec<Lit> = lits.iter().map(|l| -l).collect();
                    c.push(v);
                    self.clauses.push(c);
                } else {
                    for &l in &lits {
                        self.clauses.push(vec![v, -l]);
                    }
                    let mut c = lits.clone();
                    c.push(-v);
                    self.clauses.push(c);
                }
                v
            }
        }
    }
}

/// A satisfying assignment for the first `nvars` variables, if any.
pub(crate) fn satisfiable(p: &Prop, nvars: usize) -> Option<Vec<bool>> {
    let mut enc = Encoder { next: nvars, clauses: Vec::new() };
    let root = enc.encode(p);
    enc.clauses.push(vec![root]);
    let mut assign = vec![0i8; enc.next];
    if dpll(&enc.clauses, &mut assign) {
        Some(assign[..nvars].iter().map(|&a| a > 0).collect())
    } else {
        None
    }
}

fn value(assign: &[i8], l: Lit) -> i8 {
    let a = assign[(l.unsigned_abs() - 1) as usize];
    if l > 0 {
        a
    } else {
        -a
    }
}

fn dpll(clauses: &[Vec<Lit>], assign: &mut Vec<i8>) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut count = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => {
                        count += 1;
                        unassigned = Some(l);
                    }
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            match count {
                0 => return false,
                1 => {
                    let l = unassigned.expect("one literal");
                    assign[(l.unsigned_abs() - 1) as usize] = if l > 0 { 1 } else { -1 };
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let pick = clauses.iter().find_map(|c| {
        if c.iter().any(|&l| value(assign, l) == 1) {
            return None;
        }
        c.iter().copied().find(|&l| value(assign, l) == 0)
    });
    let Some(l) = pick else { return true };
    let var = (l.unsigned_abs() - 1) as usize;
    for choice in [if l > 0 { 1 } else { -1 }, if l > 0 { -1 } else { 1 }] {
        let mut trial = assign.clone();
        trial[var] = choice;
        if dpll(clauses, &mut trial) {
            *assign = trial;
            return true;
        }
    }
    false
}
