use std::fmt::Write;

/// A matrix-class finding with its evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassVerdict {
    pub subject: String,
    pub holds: bool,
    pub detail: String,
}

impl ClassVerdict {
    pub fn new(subject: &str, holds: bool, detail: String) -> Self {
        Self { subject: subject.into(), holds, detail }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub theorem_id: u8,
    pub holds: bool,
    /// `1 − ρ` for radius tests, `rhs − lhs` for inequalities.
    pub margin: f64,
    pub rho: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub tau: Option<f64>,
    pub mu_min: Option<f64>,
    pub omega: Option<f64>,
    pub class_verdicts: Vec<ClassVerdict>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

impl ConvergenceReport {
    pub(crate) fn new(theorem_id: u8, holds: bool, margin: f64) -> Self {
        Self {
            theorem_id,
            holds,
            margin,
            rho: None,
            lhs: None,
            rhs: None,
            tau: None,
            mu_min: None,
            omega: None,
            class_verdicts: Vec::new(),
        }
    }

    fn scalars(&self) -> [(&'static str, Option<f64>); 7] {
        [
            ("margin", Some(self.margin)),
            ("rho", self.rho),
            ("lhs", self.lhs),
            ("rhs", self.rhs),
            ("tau", self.tau),
            ("mu_min", self.mu_min),
            ("omega", self.omega),
        ]
    }

    /// `key = value` lines; absent quantities are omitted.
    pub fn to_key_value(&self) -> String {
        let mut s = format!("theorem = {}\nholds = {}\n", self.theorem_id, self.holds);
        for (k, v) in self.scalars() {
            if let Some(v) = v {
                writeln!(s, "{k} = {v:.6e}").unwrap();
            }
        }
        for c in &self.class_verdicts {
            writeln!(s, "class[{}] = {} ({})", c.subject, c.holds, c.detail).unwrap();
        }
        s
    }

    pub const CSV_HEADER: &'static str = "theorem,holds,margin,rho,lhs,rhs,tau,mu_min,omega";

    pub fn csv_row(&self) -> String {
        let mut s = format!("{},{}", self.theorem_id, self.holds);
        for (_, v) in self.scalars() {
            s.push(',');
            s.push_str(&fmt_opt(v));
        }
        s
    }
}
