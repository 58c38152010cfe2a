use std::fmt::Write as _;
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;
use szabo_core::corpus::{invariant_checks, verify_all, VerifyOptions};
use szabo_core::riemext::extension_report;
use szabo_core::szabo::analyze;
use szabo_core::tensorcalc::is_cyclic_parallel;
use szabo_core::{Check, Connection, Expr};

use crate::dsl::ConnectionSpec;

/// Largest base dimension accepted for the extension commands.
pub const MAX_EXTENSION_BASE: usize = 4;
/// Largest dimension accepted for any symbolic computation.
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Decide whether the Ricci tensor is cyclic parallel.
    CheckCyclic,
    /// Decide the affine Szabó property.
    CheckSzabo,
    /// Build the Riemannian extension and check it.
    Extend,
    /// Run every reference check; no input file needed.
    VerifyPaper,
    /// All of check-cyclic, check-szabo and extend.
    Full,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckCyclic => "check-cyclic",
            Command::CheckSzabo => "check-szabo",
            Command::Extend => "extend",
            Command::VerifyPaper => "verify-paper",
            Command::Full => "full",
        }
    }

    pub fn needs_input(self) -> bool {
        self != Command::VerifyPaper
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 42,
            samples: 50,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub indices: [usize; 3],
    pub expr: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CyclicSection {
    pub cyclic_parallel: bool,
    /// `(∇_X Ric)(X, X)` with `X = Σ a_i ∂_i`.
    pub cubic_form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Coefficient {
    pub degree: usize,
    pub expr: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub expr: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SzaboSection {
    pub is_szabo: bool,
    pub char_poly: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_coefficient: Option<Coefficient>,
    pub notes: String,
    /// Nonzero entries of `S(X)`, 1-based.
    pub matrix: Vec<Entry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionSection {
    pub dim: usize,
    /// Nonzero metric entries on and above the diagonal.
    pub metric: Vec<Entry>,
    pub is_szabo: bool,
    pub char_poly: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_coefficient: Option<Coefficient>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<CyclicSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub szabo: Option<SzaboSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionSection>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl Report {
    fn new(command: Command) -> Self {
        Report {
            command,
            input: None,
            dim: None,
            torsion_free: None,
            cyclic: None,
            szabo: None,
            extension: None,
            checks: Vec::new(),
            error: None,
            elapsed_ms: None,
        }
    }

    /// A report carrying only an error.
    pub fn failed(command: Command, error: String) -> Self {
        Report {
            error: Some(error),
            ..Report::new(command)
        }
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.ok).count()
    }

    /// 0 when nothing failed, 1 when a check failed, 2 on an error.
    pub fn exit_code(&self) -> u8 {
        if self.error.is_some() {
            2
        } else if self.failed_checks() > 0 {
            1
        } else {
            0
        }
    }

    /// JSON with sorted keys.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command.name());
        if let Some(n) = self.dim {
            let _ = writeln!(out, "dimension: {n}");
        }
        if let Some(t) = self.torsion_free {
            let _ = writeln!(out, "torsion-free: {}", yes(t));
        }
        if let Some(c) = &self.cyclic {
            let _ = writeln!(out, "cyclic parallel Ricci: {}", yes(c.cyclic_parallel));
            let _ = writeln!(out, "  (nabla_X Ric)(X,X) = {}", c.cubic_form);
            if let Some(w) = &c.witness {
                let [i, j, k] = w.indices;
                let _ = writeln!(out, "  first nonzero cyclic sum at ({i},{j},{k}): {}", w.expr);
            }
        }
        if let Some(s) = &self.szabo {
            let _ = writeln!(out, "affine Szabó: {}", yes(s.is_szabo));
            let _ = writeln!(out, "  characteristic polynomial: {}", s.char_poly);
            if let Some(f) = &s.failing_coefficient {
                let _ = writeln!(out, "  coefficient of lambda^{}: {}", f.degree, f.expr);
            }
        }
        if let Some(e) = &self.extension {
            let _ = writeln!(out, "Riemannian extension (dimension {}):", e.dim);
            for m in &e.metric {
                let _ = writeln!(out, "  g({},{}) = {}", m.i, m.j, m.expr);
            }
            let _ = writeln!(out, "pseudo-Riemannian Szabó: {}", yes(e.is_szabo));
            let _ = writeln!(out, "  characteristic polynomial: {}", e.char_poly);
            if let Some(f) = &e.failing_coefficient {
                let _ = writeln!(out, "  coefficient of lambda^{}: {}", f.degree, f.expr);
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(
                out,
                "checks: {}/{} passed",
                self.checks.len() - self.failed_checks(),
                self.checks.len()
            );
            for c in &self.checks {
                match &c.detail {
                    Some(d) if !c.ok => {
                        let _ = writeln!(out, "  FAIL {}: {d}", c.name);
                    }
                    _ => {
                        let _ = writeln!(out, "  {} {}", if c.ok { "PASS" } else { "FAIL" }, c.name);
                    }
                }
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(out, "elapsed: {ms} ms");
        }
        out
    }
}

fn coefficient(f: &Option<(usize, Expr)>, names: &[String]) -> Option<Coefficient> {
    f.as_ref().map(|(d, e)| Coefficient {
        degree: *d,
        expr: e.to_string_with(names),
    })
}

/// Runs one command. Failures of the computation land in `error`; the
/// report is returned either way.
pub fn run(command: Command, spec: Option<&ConnectionSpec>, opts: &Options) -> Report {
    let start = Instant::now();
    let mut report = Report::new(command);
    if let Err(e) = fill(&mut report, spec, opts) {
        report.error = Some(e);
    }
    if opts.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis());
    }
    report
}

fn fill(report: &mut Report, spec: Option<&ConnectionSpec>, opts: &Options) -> Result<(), String> {
    let command = report.command;
    if command == Command::VerifyPaper {
        let v = verify_all(VerifyOptions {
            seed: opts.seed,
            samples: opts.samples,
            skip_extensions: false,
        })
        .map_err(|e| e.to_string())?;
        report.checks = v.checks;
        return Ok(());
    }
    let spec = spec.ok_or("this command needs a connection file")?;
    report.input = Some(spec.to_text());
    report.dim = Some(spec.dim);
    if spec.dim > MAX_DIM {
        return Err(format!("dimension {} exceeds the limit of {MAX_DIM}", spec.dim));
    }
    let wants_extension = matches!(command, Command::Extend | Command::Full);
    if wants_extension && spec.dim > MAX_EXTENSION_BASE {
        return Err(format!(
            "extensions are limited to base dimension {MAX_EXTENSION_BASE}, got {}",
            spec.dim
        ));
    }
    let c: Connection = spec.to_connection().map_err(|e| e.to_string())?;
    report.torsion_free = Some(c.is_torsion_free());
    c.require_torsion_free().map_err(|e| e.to_string())?;
    let names = spec.variables.as_slice();

    if matches!(command, Command::CheckCyclic | Command::CheckSzabo | Command::Full) {
        let v = is_cyclic_parallel(&c).map_err(|e| e.to_string())?;
        let form = szabo_core::tensorcalc::ricci_cubic_form(&c).map_err(|e| e.to_string())?;
        report.cyclic = Some(CyclicSection {
            cyclic_parallel: v.holds,
            cubic_form: form.to_string_with(names),
            witness: v.witness.map(|w| Witness {
                indices: [w.indices.0 + 1, w.indices.1 + 1, w.indices.2 + 1],
                expr: w.expr.to_string_with(names),
            }),
        });
    }
    if matches!(command, Command::CheckSzabo | Command::Full) {
        let a = analyze(&c).map_err(|e| e.to_string())?;
        let v = &a.verdict;
        report.szabo = Some(SzaboSection {
            is_szabo: v.is_szabo,
            char_poly: v.char_poly.to_string_with(names),
            failing_coefficient: coefficient(&v.failing_coefficient, names),
            notes: v.notes.clone(),
            matrix: a
                .matrix
                .matrix()
                .entries()
                .filter(|(_, _, e)| !e.is_zero())
                .map(|(i, j, e)| Entry {
                    i: i + 1,
                    j: j + 1,
                    expr: e.to_string_with(names),
                })
                .collect(),
        });
        report.checks.extend(invariant_checks(&c).map_err(|e| e.to_string())?);
    }
    if wants_extension {
        let rep = extension_report(&c).map_err(|e| e.to_string())?;
        let n = spec.dim;
        let ext_names: Vec<String> = names
            .iter()
            .cloned()
            .chain((n + 1..=2 * n).map(|i| format!("x{i}")))
            .collect();
        let unique = {
            let mut s = ext_names.clone();
            s.sort();
            s.dedup();
            s.len() == ext_names.len()
        };
        let ext_names = if unique {
            ext_names
        } else {
            (1..=2 * n).map(|i| format!("x{i}")).collect()
        };
        report.extension = Some(ExtensionSection {
            dim: 2 * n,
            metric: rep
                .metric
                .matrix()
                .entries()
                .filter(|(i, j, e)| i <= j && !e.is_zero())
                .map(|(i, j, e)| Entry {
                    i: i + 1,
                    j: j + 1,
                    expr: e.to_string_with(&ext_names),
                })
                .collect(),
            is_szabo: rep.extension.is_szabo,
            char_poly: rep.extension.char_poly.to_string_with(&ext_names),
            failing_coefficient: coefficient(&rep.extension.failing_coefficient, &ext_names),
        });
        report.checks.extend(rep.lemma.checks.iter().cloned());
        report.checks.extend(rep.blocks.checks.iter().cloned());
        report.checks.push(Check::from_bool(
            "extension is Szabó exactly when the base is",
            rep.transfer_holds(),
            || format!("base {}, extension {}", rep.base.is_szabo, rep.extension.is_szabo),
        ));
    }
    Ok(())
}
