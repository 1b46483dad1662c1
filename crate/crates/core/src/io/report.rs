//! Plain-text certificate reports. A report records the tool version, the
//! command and input digests needed to re-run it, then one block per
//! certificate with every numeric field at 17 significant digits and a
//! closing `VERDICT <name> <PASS|FAIL|INFO>` line.

use std::fmt;

use crate::affine::AffineCertificate;
use crate::cover::LipschitzCertificate;
use crate::direction::{RotationAnalysis, RotationVerdict};
use crate::io::fmt_real;
use crate::similitude::Ifs;
use crate::verifier::{FitResult, RigidityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Info,
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Info => "INFO",
            Self::Fail => "FAIL",
        })
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PASS" => Ok(Self::Pass),
            "INFO" => Ok(Self::Info),
            "FAIL" => Ok(Self::Fail),
            _ => Err(format!("unknown status {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub name: String,
    pub fields: Vec<(String, String)>,
    pub status: Status,
}

impl Block {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Self {
            name: name.into(),
            fields: Vec::new(),
            status,
        }
    }

    pub fn text(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn real(self, key: &str, value: f64) -> Self {
        self.text(key, fmt_real(value))
    }

    /// `key` followed by `key.tol`, so a tolerance is always printed beside its value.
    pub fn real_with_tol(self, key: &str, value: f64, tol: f64) -> Self {
        let tkey = format!("{key}.tol");
        self.real(key, value).real(&tkey, tol)
    }

    pub fn ifs(mut self, prefix: &str, ifs: &Ifs<f64>) -> Self {
        self = self.text(&format!("{prefix}.k"), ifs.k());
        for (i, m) in ifs.maps().iter().enumerate() {
            let t = m.translation();
            self = self
                .real(&format!("{prefix}.map{}.ratio", i + 1), m.ratio())
                .real(&format!("{prefix}.map{}.angle", i + 1), m.angle())
                .real(&format!("{prefix}.map{}.bx", i + 1), t.x)
                .real(&format!("{prefix}.map{}.by", i + 1), t.y);
        }
        self
    }

    pub fn lipschitz(cert: &LipschitzCertificate<f64>) -> Self {
        let status = if cert.passed() { Status::Pass } else { Status::Fail };
        let mut b = Block::new("certify-lipschitz", status)
            .real("omega_f", cert.omega_f)
            .real("lipschitz_constant", cert.lipschitz_constant)
            .real("worst_ratio", cert.worst_ratio)
            .real("slack", cert.slack)
            .real("scaling_slack", cert.scaling_slack)
            .text("grid_n", cert.grid_n)
            .text("pair_budget", cert.pair_budget);
        for (i, e) in cert.entries.iter().enumerate() {
            let p = format!("delta{}", i + 1);
            b = b
                .real(&format!("{p}.delta"), e.delta)
                .real(&format!("{p}.effective_delta"), e.effective_delta)
                .text(&format!("{p}.n0"), e.n0)
                .text(&format!("{p}.lambda_size"), e.lambda_set.len())
                .real(&format!("{p}.total_length"), e.total_length)
                .real(&format!("{p}.bound_4delta"), e.bound_4delta)
                .text(&format!("{p}.checked_pairs"), e.checked_pairs)
                .real(&format!("{p}.worst_ratio"), e.worst_ratio)
                .real(&format!("{p}.max_scaling_defect"), e.max_scaling_defect)
                .text(
                    &format!("{p}.result"),
                    e.failure.as_ref().map_or("ok".to_string(), |f| f.to_string()),
                );
        }
        b
    }

    pub fn affine(cert: &AffineCertificate<f64>) -> Self {
        let status = if cert.verdict == crate::affine::AffineVerdict::AffineConsistent {
            Status::Pass
        } else {
            Status::Fail
        };
        let mut b = Block::new("certify-affine", status)
            .real("interval.lo", cert.interval.lo)
            .real("interval.hi", cert.interval.hi)
            .real("lambda", cert.lambda)
            .real("lipschitz", cert.lipschitz)
            .real("c", cert.c)
            .text("stages", cert.stages)
            .real_with_tol("measured_deviation", cert.measured_deviation, cert.slack)
            .real("bound", cert.bound)
            .text("verdict", &cert.verdict);
        for r in &cert.reports {
            let p = format!("stage{}", r.stage);
            b = b
                .text(&format!("{p}.intervals"), r.interval_count)
                .real(&format!("{p}.total_length"), r.total_length)
                .real(&format!("{p}.length_bound"), r.length_bound)
                .real(&format!("{p}.partition_error"), r.partition_error)
                .real(&format!("{p}.telescoping_error"), r.telescoping_error)
                .real(&format!("{p}.worst_gap_excess"), r.worst_gap_excess)
                .real(&format!("{p}.bound"), r.bound);
        }
        b
    }

    /// Fitting is evidence, never a pass/fail test: the status is `INFO`.
    pub fn fit(fit: &FitResult<f64>) -> Self {
        Block::new("fit", Status::Info)
            .real("residual", fit.residual)
            .real("search_residual", fit.search_residual)
            .text("grid_n", fit.grid_n)
            .text("seed", fit.seed)
            .text("winner.restart", fit.winner.0)
            .text("winner.seed", fit.winner.1)
            .text("evaluations", fit.evaluations)
            .text("budget_exhausted", fit.budget_exhausted)
            .text("searched_family", fit.searched_family())
            .ifs("ifs", &fit.ifs)
    }

    pub fn rigidity(rep: &RigidityReport<f64>) -> Self {
        let mut b = Block::new("verdict", Status::Info)
            .text("graph", &rep.graph)
            .real("line.slope", rep.line_slope)
            .real("line.intercept", rep.line_intercept)
            .real_with_tol("line_fit_residual", rep.line_fit_residual, rep.tol_affine)
            .text("classification", rep.verdict)
            .text("summary", rep.summary());
        if let Some((ifs, res)) = &rep.converse {
            b = b.real("converse.residual", *res).ifs("converse", ifs);
        }
        if let Some(f) = &rep.best_fit {
            b = b
                .real("fit.residual", f.residual)
                .text("fit.seed", f.seed)
                .text("fit.searched_family", f.searched_family())
                .ifs("fit", &f.ifs);
        }
        b
    }

    /// Status is `INFO` unless `expect_only_trivial` asks that exactly the
    /// candidates classified as 0 or π be admissible and all others rejected.
    pub fn rotation(a: &RotationAnalysis<f64>, expect_only_trivial: bool) -> Self {
        let mut ok = true;
        let mut b = Block::new("classify-rotation", Status::Info)
            .text("directions", a.directions.len())
            .text("is_line", a.is_line)
            .text("contains_arc", a.arc.contains_arc)
            .real("max_gap", a.arc.max_gap)
            .real("resolution", a.arc.resolution);
        if let Some(w) = a.arc.witness {
            b = b.real("arc.start", w.start).real("arc.length", w.length);
        }
        for (i, v) in a.verdicts.iter().enumerate() {
            let p = format!("candidate{}", i + 1);
            if expect_only_trivial {
                let trivial = v.class != crate::similitude::RotationClass::Other;
                ok &= match &v.verdict {
                    RotationVerdict::Admissible(_) => trivial,
                    RotationVerdict::Rejected(_) => !trivial,
                    RotationVerdict::Line(_) | RotationVerdict::Undecided(_) => false,
                };
            }
            b = b
                .real(&format!("{p}.theta"), v.theta)
                .text(&format!("{p}.class"), v.class)
                .text(&format!("{p}.verdict"), &v.verdict);
        }
        if expect_only_trivial {
            b.status = if ok { Status::Pass } else { Status::Fail };
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub version: String,
    pub command: Vec<String>,
    /// `(name, value)` pairs: digests of input files, seeds, resolutions.
    pub inputs: Vec<(String, String)>,
    pub blocks: Vec<Block>,
}

impl CertificateReport {
    pub fn new(version: impl Into<String>, command: Vec<String>) -> Self {
        Self {
            version: version.into(),
            command,
            inputs: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn input(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.inputs.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, b: Block) {
        self.blocks.push(b);
    }

    /// `FAIL` if any block failed, else `PASS` if any passed, else `INFO`.
    pub fn overall(&self) -> Status {
        self.blocks.iter().map(|b| b.status).max().unwrap_or(Status::Info)
    }

    pub fn render(&self) -> String {
        let mut s = String::from("# grigid certificate report\n");
        s.push_str(&format!("tool=grigid {}\n", self.version));
        s.push_str(&format!("command={}\n", self.command.join(" ")));
        for (k, v) in &self.inputs {
            s.push_str(&format!("input.{k}={v}\n"));
        }
        for b in &self.blocks {
            s.push_str(&format!("\n[{}]\n", b.name));
            for (k, v) in &b.fields {
                s.push_str(&format!("{k}={v}\n"));
            }
            s.push_str(&format!("VERDICT {} {}\n", b.name, b.status));
        }
        s
    }
}

/// Every `VERDICT <name> <status>` line of a rendered report, in order.
pub fn parse_verdicts(text: &str) -> Vec<(String, Status)> {
    text.lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            (it.next()? == "VERDICT").then_some(())?;
            let name = it.next()?.to_string();
            let status = it.next()?.parse().ok()?;
            it.next().is_none().then_some((name, status))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{certify_affine, converse_ifs};
    use crate::cover::certify_lipschitz;
    use crate::geometry::Interval;
    use crate::graph::{sample, FunctionSpec};

    #[test]
    fn render_and_parse_verdicts() {
        let ifs = converse_ifs(1.0, 0.0).unwrap();
        let g = sample(&FunctionSpec::affine(1.0, 0.0), 1024).unwrap();
        let lip = certify_lipschitz(&ifs, &g, &[0.25, 0.0625], 64).unwrap();
        let aff = certify_affine(&ifs, &g, &Interval::unit(), 4, lip.lipschitz_constant).unwrap();
        let mut r = CertificateReport::new("0.1.0", vec!["grigid".into(), "certify-affine".into()]);
        r.input("ifs.sha256", "abc");
        r.push(Block::lipschitz(&lip));
        r.push(Block::affine(&aff));
        r.push(Block::new("note", Status::Info).real("x", 0.1));
        let text = r.render();
        assert_eq!(
            parse_verdicts(&text),
            vec![
                ("certify-lipschitz".to_string(), Status::Pass),
                ("certify-affine".to_string(), Status::Pass),
                ("note".to_string(), Status::Info)
            ]
        );
        assert_eq!(r.overall(), Status::Pass);
        assert!(text.contains("x=1.0000000000000001e-1"));
        assert!(text.contains("measured_deviation.tol="));
        r.push(Block::new("bad", Status::Fail));
        assert_eq!(r.overall(), Status::Fail);
    }

    #[test]
    fn verdict_lines_are_strict() {
        assert!(parse_verdicts("VERDICT a MAYBE\nVERDICT b PASS extra\nverdict c PASS").is_empty());
        assert_eq!(CertificateReport::new("v", vec![]).overall(), Status::Info);
    }
}
