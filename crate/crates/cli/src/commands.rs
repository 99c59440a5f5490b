use crate::document::{kind_names, matrix_json, MatrixDocument, NodeDocument};
use crate::error::{exit, CliError};
use crate::selftest;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ht_rational::constructors::{
    blaschke_circle, blaschke_line, blaschke_line_pair, brune_section, theta_builder,
};
use ht_rational::factorization::{additive_decomposition, eigen_split_subspace, factor_from_projection, junitary_factor};
use ht_rational::structured::{
    make_phi_from_psi, solve_certificate, verify_certificate, Certificate, CertificateKind, Geometry, Signature,
    LINE_GRID,
};
use ht_rational::{HtError, HtMatrix, HtScalar, Node};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "htrat", version, about = "Rational matrix functions over the scaled-quaternion rings H_t")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Tolerance for residual checks.
    #[arg(long, global = true, env = "HT_TOL", default_value_t = 1e-8)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate R(x) = D + x C (I - x A)^{-1} B at real points.
    Eval {
        file: PathBuf,
        /// Evaluation points.
        #[arg(long = "x", required = true, allow_hyphen_values = true, value_delimiter = ',')]
        xs: Vec<f64>,
    },
    /// Check a certificate H for one of the four classes.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        cert: CertArgs,
        /// Certificate matrix H, overriding the one in the document.
        #[arg(long)]
        h: Option<PathBuf>,
        /// Solve for H instead of reading it, then write it back.
        #[arg(long)]
        solve_h: bool,
        /// Where --solve-h writes the document (default: the input file).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the certificate equations for H.
    SolveH {
        file: PathBuf,
        #[command(flatten)]
        cert: CertArgs,
        /// Output document (default: print H).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal or J-unitary factorization R = R1 R2.
    Factor {
        file: PathBuf,
        /// minimal, line-junitary or circle-junitary.
        #[arg(long)]
        kind: FactorKind,
        #[arg(long)]
        j: Option<PathBuf>,
        /// Supporting projection (for --kind minimal).
        #[arg(long, conflicts_with_all = ["subspace", "from_eigenpair"])]
        projection: Option<PathBuf>,
        /// Basis of an A-invariant submodule, one column per generator.
        #[arg(long, conflicts_with = "from_eigenpair")]
        subspace: Option<PathBuf>,
        /// Use the first nondegenerate eigen-derived submodule.
        #[arg(long)]
        from_eigenpair: bool,
        /// Factors are written to PREFIX.1.json and PREFIX.2.json.
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Additive decomposition phi = phi1 + phi2 of an anti-symmetric function.
    Decompose {
        file: PathBuf,
        /// line-antisym or circle-antisym.
        #[arg(long)]
        kind: Option<CertificateKind>,
        #[arg(long, conflicts_with = "from_eigenpair")]
        subspace: Option<PathBuf>,
        #[arg(long)]
        from_eigenpair: bool,
        /// Skew part of the constant term given to the second summand.
        #[arg(long)]
        skew_share: Option<PathBuf>,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Build a document from one of the standard constructions.
    Make {
        #[command(subcommand)]
        what: MakeCommand,
    },
    /// Report controllability, observability and minimality.
    Minimality { file: PathBuf },
    /// Print the McMillan degree.
    Degree { file: PathBuf },
    /// Run the acceptance criteria.
    Selftest {
        /// Criterion names or numbers to run.
        #[arg(long, value_delimiter = ',')]
        filter: Vec<String>,
        /// Deliberately break a fixture (flip-t).
        #[arg(long)]
        inject_fault: Option<selftest::Fault>,
    },
}

#[derive(Debug, Args)]
pub struct CertArgs {
    /// Class to check; defaults to the kind stored in the document.
    #[arg(long)]
    pub kind: Option<CertificateKind>,
    /// Signature matrix J, overriding the one in the document.
    #[arg(long)]
    pub j: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorKind {
    Minimal,
    LineJunitary,
    CircleJunitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Line,
    Circle,
}

#[derive(Debug, Args)]
pub struct MakeCommon {
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MakeCommand {
    /// The scalar line Blaschke factor with zero data alpha.
    BlaschkeLine {
        #[command(flatten)]
        common: MakeCommon,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_scalar)]
        alpha: HtScalar,
    },
    /// The scalar circle Blaschke factor.
    BlaschkeCircle {
        #[command(flatten)]
        common: MakeCommon,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_scalar)]
        alpha: HtScalar,
    },
    /// The 2x2 line J-unitary pair built from alpha and beta.
    BlaschkePair {
        #[command(flatten)]
        common: MakeCommon,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_scalar)]
        alpha: HtScalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_scalar)]
        beta: HtScalar,
    },
    /// A Brune section.
    Brune {
        #[command(flatten)]
        common: MakeCommon,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_scalar)]
        alpha: HtScalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_scalar)]
        beta: HtScalar,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_scalar)]
        gamma: HtScalar,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
    },
    /// Product of circle Blaschke factors with the given zeros, via the Stein equation.
    Theta {
        #[command(flatten)]
        common: MakeCommon,
        /// One zero per occurrence.
        #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_scalar)]
        alpha: Vec<HtScalar>,
    },
    /// Anti-symmetric function built from a realization psi.
    PhiFromPsi {
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        geometry: GeometryArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse `x0,x1,x2,x3`; fewer coordinates are padded with zeros.
pub fn parse_scalar(s: &str) -> Result<HtScalar, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.is_empty() || parts.len() > 4 {
        return Err(format!("expected 1 to 4 comma-separated coordinates, got '{s}'"));
    }
    let mut x = [0.0; 4];
    for (slot, p) in x.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("'{p}': {e}"))?;
    }
    Ok(HtScalar::from_coords(x))
}

struct Out<'a> {
    json: bool,
    tol: f64,
    w: &'a mut dyn Write,
}

impl Out<'_> {
    fn text(&mut self, s: impl AsRef<str>) {
        if !self.json {
            let _ = writeln!(self.w, "{}", s.as_ref());
        }
    }

    fn emit(&mut self, v: Value) {
        if self.json {
            let _ = writeln!(self.w, "{}", serde_json::to_string_pretty(&v).expect("serializable"));
        }
    }
}

/// Parse `args` (including the program name) and run the command. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    exit::OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    exit::USAGE
                }
            };
        }
    };
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        let _ = writeln!(err, "error: --tol must be a positive number");
        return exit::USAGE;
    }
    let mut o = Out { json: cli.json, tol: cli.tol, w: out };
    match dispatch(cli.command, &mut o) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if o.json {
                o.emit(json!({ "error": e.to_string(), "exit_code": e.exit_code() }));
            }
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, o: &mut Out) -> Result<i32, CliError> {
    match cmd {
        Command::Eval { file, xs } => cmd_eval(&file, &xs, o),
        Command::Verify { file, cert, h, solve_h, out } => cmd_verify(&file, &cert, h.as_deref(), solve_h, out.as_deref(), o),
        Command::SolveH { file, cert, out } => cmd_solve_h(&file, &cert, out.as_deref(), o),
        Command::Factor { file, kind, j, projection, subspace, from_eigenpair, out_prefix } => {
            let source = match (projection, subspace, from_eigenpair) {
                (Some(p), _, _) => Source::Projection(p),
                (_, Some(s), _) => Source::Subspace(s),
                (_, _, true) => Source::Eigen,
                _ => return Err(CliError::Usage("give --projection, --subspace or --from-eigenpair".into())),
            };
            cmd_factor(&file, kind, j.as_deref(), source, &out_prefix, o)
        }
        Command::Decompose { file, kind, subspace, from_eigenpair, skew_share, out_prefix } => {
            let source = match (subspace, from_eigenpair) {
                (Some(s), _) => Source::Subspace(s),
                (_, true) => Source::Eigen,
                _ => return Err(CliError::Usage("give --subspace or --from-eigenpair".into())),
            };
            cmd_decompose(&file, kind, source, skew_share.as_deref(), &out_prefix, o)
        }
        Command::Make { what } => cmd_make(what, o),
        Command::Minimality { file } => cmd_minimality(&file, o),
        Command::Degree { file } => {
            let doc = NodeDocument::read(&file)?;
            let node = doc.node()?;
            let deg = node.mcmillan_degree()?;
            o.text(format!("{deg}"));
            o.emit(json!({ "degree": deg, "state_dim": node.state_dim() }));
            Ok(exit::OK)
        }
        Command::Selftest { filter, inject_fault } => cmd_selftest(filter, inject_fault, o),
    }
}

// shortest round-trip decimals, negative zero printed as 0
fn short_quad(q: &HtScalar) -> String {
    let c: Vec<String> = q.coords().iter().map(|&x| format!("{}", if x == 0.0 { 0.0 } else { x })).collect();
    format!("[{}]", c.join(", "))
}

fn format_matrix(m: &HtMatrix) -> String {
    (0..m.nrows())
        .map(|r| {
            let row: Vec<String> = (0..m.ncols()).map(|c| short_quad(&m[(r, c)])).collect();
            format!("  [{}]", row.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cmd_eval(file: &Path, xs: &[f64], o: &mut Out) -> Result<i32, CliError> {
    let node = NodeDocument::read(file)?.node()?;
    let mut points = Vec::new();
    let mut any_pole = false;
    for &x in xs {
        match node.eval(x) {
            Ok(v) => {
                o.text(format!("x = {x}\n{}", format_matrix(&v)));
                points.push(json!({ "x": x, "value": matrix_json(&v) }));
            }
            Err(HtError::PoleAt(_)) => {
                any_pole = true;
                o.text(format!("x = {x}\n  pole"));
                points.push(json!({ "x": x, "pole": true }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    o.emit(json!({ "points": points }));
    Ok(if any_pole { exit::POLE } else { exit::OK })
}

fn resolve_kind(doc: &NodeDocument, requested: Option<CertificateKind>) -> Result<CertificateKind, CliError> {
    match (requested, doc.kind) {
        (Some(r), Some(d)) if r != d && doc.h.is_some() => {
            Err(HtError::KindMismatch { expected: r.name().into(), found: d.name().into() }.into())
        }
        (Some(r), _) => Ok(r),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(CliError::Usage(format!("no kind in the document; pass --kind ({})", kind_names()))),
    }
}

fn resolve_signature(
    doc: &NodeDocument,
    j_file: Option<&Path>,
    kind: CertificateKind,
    tol: f64,
) -> Result<Option<Signature>, CliError> {
    if !kind.is_junitary() {
        return Ok(None);
    }
    let ctx = doc.ctx()?;
    let j = match j_file {
        Some(p) => Some(Signature::new(MatrixDocument::read(p)?.matrix, &ctx, tol)?),
        None => doc.signature(tol)?,
    };
    // a scalar function without an explicit J is taken with J = 1
    Ok(j.or_else(|| (doc.d.nrows() == 1).then(|| Signature::identity(1))))
}

fn cmd_verify(
    file: &Path,
    args: &CertArgs,
    h_file: Option<&Path>,
    solve_h: bool,
    out: Option<&Path>,
    o: &mut Out,
) -> Result<i32, CliError> {
    let doc = NodeDocument::read(file)?;
    let kind = resolve_kind(&doc, args.kind)?;
    let node = doc.node()?;
    let j = resolve_signature(&doc, args.j.as_deref(), kind, o.tol)?;
    let cert = if solve_h {
        solve_certificate(&node, j.as_ref(), kind, o.tol)?
    } else if let Some(p) = h_file {
        Certificate { kind, h: MatrixDocument::read(p)?.matrix, residual: f64::NAN }
    } else {
        match doc.certificate() {
            Some(c) => c,
            None => return Err(CliError::Usage("the document has no H; pass --h FILE or --solve-h".into())),
        }
    };
    let report = verify_certificate(&node, j.as_ref(), &cert, kind, &LINE_GRID, o.tol)?;
    o.text(format!("kind {kind}, tolerance {:.1e}, {} samples, {} pairs", report.tol, report.samples_used, report.pairs_used));
    for e in &report.entries {
        let mark = if e.value <= report.tol { "ok  " } else { "FAIL" };
        o.text(format!("  {mark} {:<28} {:.3e}", e.label, e.value));
    }
    let passed = report.passed();
    o.text(if passed { "verified".to_string() } else { format!("not verified: {}", CliError::VerificationFailed(report.max_residual())) });
    if solve_h && passed {
        let target = out.unwrap_or(file);
        doc.clone().with_signature(j.as_ref()).with_certificate(&cert).write(target)?;
        o.text(format!("wrote {}", target.display()));
    }
    let entries: Vec<Value> = report.entries.iter().map(|e| json!({ "label": e.label, "value": e.value })).collect();
    o.emit(json!({
        "kind": kind.name(),
        "passed": passed,
        "tol": report.tol,
        "max_residual": report.max_residual(),
        "samples": report.samples_used,
        "pairs": report.pairs_used,
        "residuals": entries,
        "h": matrix_json(&cert.h),
    }));
    Ok(if passed { exit::OK } else { exit::CHECK_FAILED })
}

fn cmd_solve_h(file: &Path, args: &CertArgs, out: Option<&Path>, o: &mut Out) -> Result<i32, CliError> {
    let doc = NodeDocument::read(file)?;
    let kind = resolve_kind(&doc, args.kind)?;
    let node = doc.node()?;
    let j = resolve_signature(&doc, args.j.as_deref(), kind, o.tol)?;
    let cert = solve_certificate(&node, j.as_ref(), kind, o.tol)?;
    o.text(format!("H ({kind}, equation residual {:.3e}):\n{}", cert.residual, format_matrix(&cert.h)));
    if let Some(p) = out {
        doc.with_signature(j.as_ref()).with_certificate(&cert).write(p)?;
        o.text(format!("wrote {}", p.display()));
    }
    o.emit(json!({ "kind": kind.name(), "residual": cert.residual, "h": matrix_json(&cert.h) }));
    Ok(exit::OK)
}

enum Source {
    Projection(PathBuf),
    Subspace(PathBuf),
    Eigen,
}

fn factor_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with = |n: u8| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(format!(".{n}.json"));
        PathBuf::from(s)
    };
    (with(1), with(2))
}

fn certificate_for(node: &Node, doc: &NodeDocument, j: Option<&Signature>, kind: CertificateKind, tol: f64) -> Result<Certificate, CliError> {
    match doc.certificate() {
        Some(c) if c.kind == kind => Ok(c),
        Some(c) => Err(HtError::KindMismatch { expected: kind.name().into(), found: c.kind.name().into() }.into()),
        None => Ok(solve_certificate(node, j, kind, tol)?),
    }
}

fn degree_report(o: &mut Out, whole: &Node, first: &Node, second: &Node, paths: (&Path, &Path), sum: bool) -> Result<(), CliError> {
    let (d, d1, d2) = (whole.mcmillan_degree()?, first.mcmillan_degree()?, second.mcmillan_degree()?);
    let rel = if sum { "+" } else { "*" };
    o.text(format!("degree {d} = {d1} + {d2}{}", if d == d1 + d2 { "" } else { " (not minimal)" }));
    o.text(format!("wrote {} and {} ({rel})", paths.0.display(), paths.1.display()));
    o.emit(json!({
        "degree": d,
        "factor_degrees": [d1, d2],
        "minimal": d == d1 + d2,
        "files": [paths.0.display().to_string(), paths.1.display().to_string()],
    }));
    Ok(())
}

fn cmd_factor(
    file: &Path,
    kind: FactorKind,
    j_file: Option<&Path>,
    source: Source,
    prefix: &Path,
    o: &mut Out,
) -> Result<i32, CliError> {
    let doc = NodeDocument::read(file)?;
    let node = doc.node()?;
    let ctx = doc.ctx()?;
    let (p1, p2) = factor_paths(prefix);
    let (r1, r2) = match kind {
        FactorKind::Minimal => {
            let Source::Projection(p) = source else {
                return Err(CliError::Usage("--kind minimal needs --projection".into()));
            };
            let pi = MatrixDocument::read(&p)?.matrix;
            let pair = factor_from_projection(&node, &pi, o.tol)?;
            NodeDocument::from_node(&pair.r1).with_label("factor", 1).write(&p1)?;
            NodeDocument::from_node(&pair.r2).with_label("factor", 2).write(&p2)?;
            (pair.r1, pair.r2)
        }
        FactorKind::LineJunitary | FactorKind::CircleJunitary => {
            let geometry = if kind == FactorKind::LineJunitary { Geometry::Line } else { Geometry::Circle };
            let ck = CertificateKind::junitary(geometry);
            let j = resolve_signature(&doc, j_file, ck, o.tol)?
                .ok_or_else(|| CliError::Usage("a J-unitary factorization needs J; pass --j FILE".into()))?;
            let cert = certificate_for(&node, &doc, Some(&j), ck, o.tol)?;
            let m = match source {
                Source::Subspace(p) => MatrixDocument::read(&p)?.matrix,
                Source::Eigen => eigen_split_subspace(node.a(), &cert.h, &ctx, o.tol)?,
                Source::Projection(_) => {
                    return Err(CliError::Usage("J-unitary factorization takes --subspace or --from-eigenpair".into()))
                }
            };
            let f = junitary_factor(&node, &j, &cert, &m, geometry, o.tol)?;
            NodeDocument::from_node(&f.r1).with_signature(Some(&j)).with_certificate(&f.cert1).with_label("factor", 1).write(&p1)?;
            NodeDocument::from_node(&f.r2).with_signature(Some(&j)).with_certificate(&f.cert2).with_label("factor", 2).write(&p2)?;
            (f.r1, f.r2)
        }
    };
    degree_report(o, &node, &r1, &r2, (&p1, &p2), false)?;
    Ok(exit::OK)
}

fn cmd_decompose(
    file: &Path,
    kind: Option<CertificateKind>,
    source: Source,
    skew_share: Option<&Path>,
    prefix: &Path,
    o: &mut Out,
) -> Result<i32, CliError> {
    let doc = NodeDocument::read(file)?;
    let kind = resolve_kind(&doc, kind)?;
    if kind.is_junitary() {
        return Err(HtError::KindMismatch { expected: "line-antisym or circle-antisym".into(), found: kind.name().into() }.into());
    }
    let phi = doc.node()?;
    let ctx = doc.ctx()?;
    let cert = certificate_for(&phi, &doc, None, kind, o.tol)?;
    let m = match source {
        Source::Subspace(p) => MatrixDocument::read(&p)?.matrix,
        Source::Eigen => {
            // the split runs on the J-unitary embedding whose certificate is -H
            eigen_split_subspace(phi.a(), &cert.h.neg(), &ctx, o.tol)?
        }
        Source::Projection(_) => unreachable!("decompose takes no projection"),
    };
    let share = match skew_share {
        Some(p) => Some(MatrixDocument::read(p)?.matrix),
        None => None,
    };
    let s = additive_decomposition(&phi, &cert, &m, share.as_ref(), o.tol)?;
    let (p1, p2) = factor_paths(prefix);
    NodeDocument::from_node(&s.phi1).with_certificate(&s.cert1).with_label("summand", 1).write(&p1)?;
    NodeDocument::from_node(&s.phi2).with_certificate(&s.cert2).with_label("summand", 2).write(&p2)?;
    degree_report(o, &phi, &s.phi1, &s.phi2, (&p1, &p2), true)?;
    Ok(exit::OK)
}

fn emit_document(doc: NodeDocument, out: Option<&Path>, o: &mut Out) -> Result<i32, CliError> {
    match out {
        Some(p) => {
            doc.write(p)?;
            o.text(format!("wrote {}", p.display()));
            o.emit(json!({ "file": p.display().to_string() }));
        }
        None => {
            let _ = write!(o.w, "{}", doc.to_text());
        }
    }
    Ok(exit::OK)
}

fn cmd_make(what: MakeCommand, o: &mut Out) -> Result<i32, CliError> {
    let ctx_of = |t: f64| ht_rational::AlgebraContext::new(t).map_err(CliError::from);
    let (doc, out) = match what {
        MakeCommand::BlaschkeLine { common, alpha } => {
            let (node, cert) = blaschke_line(alpha, ctx_of(common.t)?)?;
            let doc = NodeDocument::from_node(&node).with_signature(Some(&Signature::identity(1))).with_certificate(&cert);
            (doc.with_label("constructor", "blaschke-line"), common.out)
        }
        MakeCommand::BlaschkeCircle { common, alpha } => {
            let (node, cert) = blaschke_circle(alpha, ctx_of(common.t)?)?;
            let doc = NodeDocument::from_node(&node).with_signature(Some(&Signature::identity(1))).with_certificate(&cert);
            (doc.with_label("constructor", "blaschke-circle"), common.out)
        }
        MakeCommand::BlaschkePair { common, alpha, beta } => {
            let (node, j, cert) = blaschke_line_pair(alpha, beta, ctx_of(common.t)?)?;
            let doc = NodeDocument::from_node(&node).with_signature(Some(&j)).with_certificate(&cert);
            (doc.with_label("constructor", "blaschke-pair"), common.out)
        }
        MakeCommand::Brune { common, alpha, beta, gamma, h } => {
            let (node, j, cert) = brune_section(alpha, beta, gamma, h, ctx_of(common.t)?, o.tol)?;
            let doc = NodeDocument::from_node(&node).with_signature(Some(&j)).with_certificate(&cert);
            (doc.with_label("constructor", "brune"), common.out)
        }
        MakeCommand::Theta { common, alpha } => {
            let th = theta_builder(&alpha, ctx_of(common.t)?, o.tol)?;
            let cert = th.certificate()?;
            let doc = NodeDocument::from_node(&th.node)
                .with_signature(Some(&Signature::identity(1)))
                .with_certificate(&cert)
                .with_label("constructor", "theta")
                .with_label("stein_series_discrepancy", th.stein.series_discrepancy);
            (doc, common.out)
        }
        MakeCommand::PhiFromPsi { psi, geometry, out } => {
            let psi = NodeDocument::read(&psi)?.node()?;
            let g = match geometry {
                GeometryArg::Line => Geometry::Line,
                GeometryArg::Circle => Geometry::Circle,
            };
            let (node, cert) = make_phi_from_psi(&psi, g)?;
            let doc = NodeDocument::from_node(&node).with_certificate(&cert).with_label("constructor", "phi-from-psi");
            (doc, out)
        }
    };
    emit_document(doc, out.as_deref(), o)
}

fn cmd_minimality(file: &Path, o: &mut Out) -> Result<i32, CliError> {
    let node = NodeDocument::read(file)?.node()?;
    let n = node.state_dim();
    // ranks are of the complex embedding, twice the quaternionic state dimension
    let (cr, or) = (node.controllability_rank(), node.observability_rank());
    let deg = node.mcmillan_degree()?;
    let minimal = node.is_minimal();
    o.text(format!("state dimension {n}"));
    o.text(format!("controllable: {} (embedded rank {cr} of {})", node.is_controllable(), 2 * n));
    o.text(format!("observable:   {} (embedded rank {or} of {})", node.is_observable(), 2 * n));
    o.text(format!("McMillan degree {deg}; {}", if minimal { "minimal" } else { "not minimal" }));
    o.emit(json!({
        "state_dim": n,
        "controllable": node.is_controllable(),
        "observable": node.is_observable(),
        "controllability_rank": cr,
        "observability_rank": or,
        "degree": deg,
        "minimal": minimal,
    }));
    Ok(if minimal { exit::OK } else { exit::NOT_MINIMAL })
}

fn cmd_selftest(filter: Vec<String>, fault: Option<selftest::Fault>, o: &mut Out) -> Result<i32, CliError> {
    let unknown = selftest::unknown_filters(&filter);
    if !unknown.is_empty() {
        let names: Vec<&str> = selftest::CRITERIA.iter().map(|(_, n)| *n).collect();
        return Err(CliError::Usage(format!("unknown criteria {unknown:?}; known: {}", names.join(", "))));
    }
    let opts = selftest::Options { filter, fault };
    let json = o.json;
    let results = selftest::run(&opts, |r| {
        if !json {
            let _ = writeln!(o.w, "{}", r.line());
            let _ = o.w.flush();
        }
    });
    let failed = results.iter().filter(|r| !r.passed).count();
    o.text(format!("{} of {} criteria passed", results.len() - failed, results.len()));
    let rows: Vec<Value> = results
        .iter()
        .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "seconds": r.seconds, "detail": r.detail }))
        .collect();
    o.emit(json!({ "passed": failed == 0, "criteria": rows }));
    Ok(if failed == 0 { exit::OK } else { exit::CHECK_FAILED })
}
