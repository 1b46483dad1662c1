use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

use grigid::direction::AdmissibleOptions;
use grigid::io::{
    load_graph, parse_ifs_document, render_svg, save_graph, serialize_ifs, sidecar_path, Block, CertificateReport,
    IfsMetadata, Overlay, Status, Style,
};
use grigid::{
    admissible_rotations, cantor_refine, certify_affine, certify_lipschitz, chaos_game, fit_similitudes,
    framing_rectangle, generate_intervals, phi_image, rigidity_verdict, sample, self_similarity_residual,
    CantorStage, FitOptions, FunctionSpec64, Ifs64, Interval, RigidityConfig, RotationRestriction, SampledGraph64,
};

use crate::args::{Cli, Command, FitArgs, FunctionKind, GraphArgs, ReportOut};

/// Runs one subcommand and returns its exit code.
pub fn run(cli: &Cli) -> Result<u8> {
    let argv: Vec<String> = std::iter::once("grigid".to_string())
        .chain(std::env::args().skip(1))
        .collect();
    let mut report = CertificateReport::new(env!("CARGO_PKG_VERSION"), argv);
    let out = match &cli.command {
        Command::Render(a) => {
            render(a, &mut report)?;
            None
        }
        Command::Verify(a) => {
            let g = load(&a.graph, &mut report)?;
            let ifs = load_ifs(&a.ifs, &mut report)?;
            let tol = a.tol.unwrap_or(2.0 * g.h());
            let res = self_similarity_residual(&ifs, &g);
            let status = if res <= tol { Status::Pass } else { Status::Fail };
            report.push(
                Block::new("verify", status)
                    .text("grid_n", g.n())
                    .real_with_tol("residual", res, tol)
                    .ifs("ifs", &ifs),
            );
            Some(&a.report)
        }
        Command::CertifyLipschitz(a) => {
            let g = load(&a.graph, &mut report)?;
            let ifs = load_ifs(&a.ifs, &mut report)?;
            report.input("pairs", a.pairs);
            match certify_lipschitz(&ifs, &g, &a.deltas, a.pairs) {
                Ok(cert) => report.push(Block::lipschitz(&cert)),
                Err(e) => report.push(failure("certify-lipschitz", &e)),
            }
            Some(&a.report)
        }
        Command::CertifyAffine(a) => {
            let g = load(&a.graph, &mut report)?;
            let ifs = load_ifs(&a.ifs, &mut report)?;
            let target = Interval::new(a.interval[0], a.interval[1]);
            report.input("stages", a.stages);
            report.input("interval", format!("{},{}", a.interval[0], a.interval[1]));
            let lipschitz = match a.lipschitz {
                Some(l) => {
                    report.input("lipschitz", l);
                    Some(l)
                }
                None => {
                    let deltas = crate::args::default_deltas();
                    match certify_lipschitz(&ifs, &g, &deltas, grigid::cover::DEFAULT_PAIR_BUDGET) {
                        Ok(cert) => {
                            let passed = cert.passed();
                            report.push(Block::lipschitz(&cert));
                            passed.then_some(cert.lipschitz_constant)
                        }
                        Err(e) => {
                            report.push(failure("certify-lipschitz", &e));
                            None
                        }
                    }
                }
            };
            match lipschitz {
                Some(l) => match certify_affine(&ifs, &g, &target, a.stages, l) {
                    Ok(cert) => report.push(Block::affine(&cert)),
                    Err(e) => report.push(failure("certify-affine", &e)),
                },
                None => report.push(
                    Block::new("certify-affine", Status::Fail).text("error", "no certified Lipschitz constant"),
                ),
            }
            Some(&a.report)
        }
        Command::ClassifyRotation(a) => {
            let g = load(&a.graph, &mut report)?;
            let angles = a
                .angles
                .iter()
                .map(|s| parse_angle(s))
                .collect::<Result<Vec<_>>>()?;
            report.input("angles", a.angles.join(","));
            report.input("tol", a.tol);
            match admissible_rotations(&g, &angles, a.tol, &AdmissibleOptions::default()) {
                Ok(an) => report.push(Block::rotation(&an, a.expect_trivial)),
                Err(e) => report.push(failure("classify-rotation", &e)),
            }
            Some(&a.report)
        }
        Command::Fit(a) => {
            let g = load(&a.graph, &mut report)?;
            let opts = fit_options(&a.fit, &mut report);
            let fit = fit_similitudes(&g, &opts).map_err(|e| anyhow!(e))?;
            if let Some(p) = &a.save_ifs {
                let meta = IfsMetadata {
                    name: Some(format!("fit k={}", opts.k)),
                    source: Some(g.name().to_string()),
                };
                fs::write(p, serialize_ifs(&fit.ifs, &meta)).with_context(|| format!("writing {}", p.display()))?;
            }
            report.push(Block::fit(&fit));
            Some(&a.report)
        }
        Command::Verdict(a) => {
            let g = load(&a.graph, &mut report)?;
            let fit = fit_options(&a.fit, &mut report);
            report.input("tol_affine", a.tol_affine);
            let config = RigidityConfig {
                tol_affine: a.tol_affine,
                fit,
            };
            let rep = rigidity_verdict(&g, &config).map_err(|e| anyhow!(e))?;
            report.push(Block::rigidity(&rep));
            Some(&a.report)
        }
    };
    let text = report.render();
    match out.and_then(|o: &ReportOut| o.out.as_ref()) {
        Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(match report.overall() {
        Status::Fail => 1,
        Status::Pass | Status::Info => 0,
    })
}

fn failure(name: &str, e: &grigid::Error) -> Block {
    Block::new(name, Status::Fail).text("error", e)
}

fn fit_options(a: &FitArgs, report: &mut CertificateReport) -> FitOptions {
    let o = FitOptions {
        k: a.k,
        restriction: if a.free_rotations {
            RotationRestriction::Free
        } else {
            RotationRestriction::ZeroOrPi
        },
        restarts: a.restarts,
        seed: a.seed.seed,
        budget: a.budget,
        search_points: a.search_points,
    };
    report.input("seed", o.seed);
    report.input("k", o.k);
    report.input("restarts", o.restarts);
    report.input("budget", o.budget);
    report.input("search_points", o.search_points);
    report.input("rotations", o.restriction);
    o
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn load_ifs(path: &Path, report: &mut CertificateReport) -> Result<Ifs64> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = parse_ifs_document(&text).with_context(|| format!("{}", path.display()))?;
    report.input("ifs", path.display());
    report.input("ifs.sha256", sha256_hex(text.as_bytes()));
    Ok(doc.ifs)
}

fn load(a: &GraphArgs, report: &mut CertificateReport) -> Result<SampledGraph64> {
    if let Some(p) = &a.csv {
        let g = load_graph(p).with_context(|| format!("{}", p.display()))?;
        report.input("csv", p.display());
        report.input("csv.sha256", sha256_hex(&fs::read(p)?));
        report.input("csv.meta.sha256", sha256_hex(&fs::read(sidecar_path(p))?));
        report.input("n", g.n());
        return Ok(g);
    }
    let kind = a
        .function
        .ok_or_else(|| anyhow!("one of --function or --csv is required"))?;
    let spec = match kind {
        FunctionKind::Affine => FunctionSpec64::affine(a.a, a.b),
        FunctionKind::Takagi => FunctionSpec64::Takagi {
            depth: a.depth.unwrap_or(grigid::graph::DEFAULT_TAKAGI_DEPTH),
        },
        FunctionKind::Weierstrass => FunctionSpec64::Weierstrass {
            a: a.wa,
            b: a.wb,
            depth: a.depth.unwrap_or(grigid::graph::DEFAULT_WEIERSTRASS_DEPTH),
        },
        FunctionKind::Cantor => FunctionSpec64::CantorLebesgue {
            depth: a.depth.unwrap_or(grigid::graph::DEFAULT_CANTOR_DEPTH),
        },
    };
    let g = sample(&spec, a.n).map_err(|e| anyhow!(e))?;
    report.input("function", spec.describe());
    report.input("n", a.n);
    Ok(g)
}

/// Accepts plain radians or `[m]pi[/d]` with an optional `*` and sign.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| anyhow!("bad angle {s:?}"));
    };
    let coef = t[..at].trim_end_matches('*');
    let m = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| anyhow!("bad angle {s:?}"))?,
    };
    let rest = &t[at + 2..];
    let d = match rest {
        "" => 1.0,
        r => match r.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| anyhow!("bad angle {s:?}"))?,
            None => bail!("bad angle {s:?}"),
        },
    };
    if d == 0.0 {
        bail!("bad angle {s:?}");
    }
    Ok(if m == 1.0 && d == 1.0 { PI } else { m * PI / d })
}

fn render(a: &crate::args::RenderArgs, report: &mut CertificateReport) -> Result<()> {
    let g = load(&a.graph, report)?;
    let ifs = match &a.ifs {
        Some(p) => Some(load_ifs(p, report)?),
        None => None,
    };
    let mut rects = Vec::new();
    if let (Some(depth), Some(ifs)) = (a.frames, &ifs) {
        let unit = Interval::unit();
        let frame = framing_rectangle(&g, &unit).map_err(|e| anyhow!(e))?;
        for (_, iv) in generate_intervals(ifs, &frame, depth).map_err(|e| anyhow!(e))? {
            let clipped = Interval::new(iv.lo.max(0.0), iv.hi.min(1.0));
            rects.push(framing_rectangle(&g, &clipped).map_err(|e| anyhow!(e))?);
        }
    }
    let mut stage = None;
    if let (Some(stages), Some(ifs)) = (a.cantor, &ifs) {
        let mut s = CantorStage::initial(Interval::unit());
        for _ in 0..stages {
            s = cantor_refine(ifs, &g, &s).map_err(|e| anyhow!(e))?;
        }
        stage = Some(s);
    }
    let points = match (a.points, &ifs) {
        (Some(n), Some(ifs)) => {
            report.input("seed", a.seed.seed);
            Some(chaos_game(ifs, n, a.seed.seed, grigid::attractor::DEFAULT_BURN_IN).map_err(|e| anyhow!(e))?)
        }
        _ => None,
    };
    let dirs = if a.directions {
        Some(phi_image(&g, g.point(0), None).map_err(|e| anyhow!(e))?)
    } else {
        None
    };

    let mut overlays = Vec::new();
    if !rects.is_empty() {
        overlays.push(Overlay::Rectangles(&rects));
    }
    if let Some(s) = &stage {
        overlays.push(Overlay::Cantor(s));
    }
    if let Some(p) = &points {
        overlays.push(Overlay::Points(p));
    }
    if let Some(d) = &dirs {
        overlays.push(Overlay::Directions(d));
    }
    let style = Style {
        width: a.width,
        height: a.height,
        title: a.title.clone(),
        ..Style::default()
    };
    let svg = render_svg(Some(&g), &overlays, &style);
    fs::write(&a.out, &svg).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(p) = &a.csv_out {
        save_graph(&g, p, BTreeMap::new()).with_context(|| format!("{}", p.display()))?;
    }
    let mut b = Block::new("render", Status::Info)
        .text("svg", a.out.display())
        .text("svg.sha256", sha256_hex(svg.as_bytes()))
        .text("polyline_points", g.n() + 1)
        .text("frames", rects.len());
    if let Some(s) = &stage {
        b = b.text("cantor.stage", s.stage).text("cantor.intervals", s.intervals.len());
    }
    if let Some(p) = &points {
        b = b.text("points", p.len());
    }
    if let Some(d) = &dirs {
        b = b.text("directions", d.len());
    }
    report.push(b);
    Ok(())
}
