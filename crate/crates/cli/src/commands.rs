use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use qplex::geometry::{
    find_mmd_sets, is_germ, make_geometry, polar_membership, polar_point, stem_membership,
    PointSet, StemStatus,
};
use qplex::germlab::{
    generalized_params, grow_sorted_qplex, sample_constraint_variety, spectra_lemma_check,
    EigProfile, EqualityFamily,
};
use qplex::linalg::{
    haar_unitary, haar_unitary_from, max_abs_diff, random_density_from, rng, DensityOperator,
    HermitianOperator,
};
use qplex::rep::{
    evolve, povm_to_measurement, prob_to_operator, state_to_prob, urgleichung,
    validate_state_vector, DimensionParams, GeneralParams,
};
use qplex::sic::{
    build_quasi_sic, complement_quasi_sic, search_fiducial, sic_from_fiducial, triple_products,
    verify_sic, QuasiSic, SearchOptions, SicFiducial, SicSystem, SicVerification,
};
use qplex::symmetry::{
    group_closure_check, stretch, stretched_from_antiunitary, stretched_from_unitary,
    verify_stretched_with, StretchedMatrix, SymmetryReport,
};
use qplex::tol::{TAU_EIG, TAU_PSD, TAU_SIC, TAU_SYM};
use qplex::QplexError;

use crate::args::{
    Cli, Command, GeomCommand, GermCommand, GlobalArgs, ParamsArgs, RepCommand, SicCommand,
    SicSource, SymCommand,
};
use crate::document::{save_document, Document, DocumentError, Kind, Meta};
use crate::report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Core(#[from] QplexError),
}

/// Result of one invocation. Nothing is printed by [`dispatch`] itself.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<RunReport>,
}

struct Context<'a> {
    global: &'a GlobalArgs,
    report: RunReport,
    inputs: Vec<Vec<u8>>,
    out: String,
    seed: Option<u64>,
}

impl<'a> Context<'a> {
    fn say(&mut self, line: impl AsRef<str>) {
        self.out.push_str(line.as_ref());
        self.out.push('\n');
    }

    /// The effective seed, chosen and announced on first use.
    fn seed(&mut self) -> u64 {
        if let Some(s) = self.seed {
            return s;
        }
        let s = self.global.seed.unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|t| t.as_nanos() as u64)
                .unwrap_or(0)
        });
        self.seed = Some(s);
        self.report.seed = Some(s);
        self.say(format!("seed: {s}"));
        s
    }

    fn tol(&self, default: f64) -> f64 {
        self.global.tol.unwrap_or(default)
    }

    fn meta(&self) -> Meta {
        Meta::new(self.seed)
    }

    /// `--dim`, checked against a document dimension when one is known.
    fn dim(&self, from_doc: Option<usize>) -> Result<usize, CliError> {
        match (self.global.dim, from_doc) {
            (Some(a), Some(b)) if a != b => Err(CliError::Usage(format!(
                "--dim {a} does not match the input dimension {b}"
            ))),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Err(CliError::Usage("--dim is required".into())),
        }
    }

    fn load(&mut self, path: &Path, kinds: &[Kind]) -> Result<Document, CliError> {
        let bytes = std::fs::read(path).map_err(|source| DocumentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8_lossy(&bytes).into_owned();
        self.inputs.push(bytes);
        let doc = Document::parse(&text, path)?;
        if !kinds.contains(&doc.kind()) {
            return Err(DocumentError::Kind {
                path: path.to_path_buf(),
                expected: kinds
                    .iter()
                    .map(|k| k.as_str())
                    .collect::<Vec<_>>()
                    .join(" or "),
                found: doc.kind().to_string(),
            }
            .into());
        }
        Ok(doc)
    }

    fn write(&self, doc: &Document) -> Result<(), CliError> {
        if let Some(path) = &self.global.out {
            save_document(doc, path)?;
        }
        Ok(())
    }
}

fn add_sic_checks(report: &mut RunReport, v: &SicVerification, tol: f64) {
    report.check("sic.count", v.count_ok);
    report.check_below("sic.trace_deviation", v.max_trace_deviation, tol);
    report.check_below(
        "sic.idempotency_deviation",
        v.max_idempotency_deviation,
        tol,
    );
    report.check_below(
        "sic.diagonal_overlap_deviation",
        v.max_diagonal_overlap_deviation,
        tol,
    );
    report.check_below("sic.overlap_deviation", v.max_overlap_deviation, tol);
    report.check_below("sic.identity_deviation", v.identity_deviation, tol);
}

fn add_symmetry_checks(report: &mut RunReport, v: &SymmetryReport) {
    let tol = v.tolerance;
    report.check_below("sym.orthogonality_defect", v.orthogonality_defect, tol);
    report.check_below("sym.barycenter_defect", v.barycenter_defect, tol);
    report.check_below("sym.row_sum_defect", v.row_sum_defect, tol);
    report.check_below("sym.column_sum_defect", v.column_sum_defect, tol);
    report.check("sym.entries_at_least_minus_one_over_d", v.entries_ok());
    report.check_below("sym.simplex_vertex_norm_defect", v.vertex_norm_defect, tol);
    report.check_below("sym.simplex_regularity_defect", v.regularity_defect, tol);
    report.summary("sym.min_entry", v.min_entry);
}

fn known_fiducial(d: usize) -> Option<SicFiducial> {
    match d {
        2 => Some(SicFiducial::qubit_tetrahedral()),
        3 => Some(SicFiducial::qutrit_exact()),
        _ => None,
    }
}

fn sic_from_doc(doc: &Document) -> Result<SicSystem, CliError> {
    match doc.kind() {
        Kind::Fiducial => {
            let fid = doc
                .to_fiducial()
                .ok_or_else(|| CliError::Usage("invalid fiducial".into()))?;
            Ok(sic_from_fiducial(&fid)?)
        }
        _ => doc
            .to_sic_system()
            .ok_or_else(|| CliError::Usage("invalid SIC system".into())),
    }
}

/// The SIC named by `--sic`, a known fiducial, or a seeded search.
fn resolve_sic(
    ctx: &mut Context,
    source: &SicSource,
    doc_dim: Option<usize>,
) -> Result<SicSystem, CliError> {
    let sys = if let Some(path) = &source.sic {
        let doc = ctx.load(path, &[Kind::Fiducial, Kind::SicSystem])?;
        ctx.dim(Some(doc.dim))?;
        if let Some(d) = doc_dim {
            if d != doc.dim {
                return Err(CliError::Usage(format!(
                    "SIC dimension {} does not match the input dimension {d}",
                    doc.dim
                )));
            }
        }
        sic_from_doc(&doc)?
    } else {
        let d = ctx.dim(doc_dim)?;
        match known_fiducial(d) {
            Some(f) => sic_from_fiducial(&f)?,
            None => {
                let seed = ctx.seed();
                let opts = SearchOptions::default();
                let out = search_fiducial(d, seed, &opts)?;
                ctx.say(format!(
                    "fiducial: restart {} defect {:.3e}",
                    out.restart, out.defect
                ));
                sic_from_fiducial(&out.fiducial)?
            }
        }
    };
    if ctx.global.verify {
        let v = verify_sic(&sys);
        add_sic_checks(&mut ctx.report, &v, TAU_SIC);
    }
    Ok(sys)
}

fn load_points(ctx: &mut Context, path: &Path) -> Result<(usize, PointSet), CliError> {
    let doc = ctx.load(path, &[Kind::PointSet, Kind::ProbVector])?;
    let d = ctx.dim(Some(doc.dim))?;
    let set = match doc.kind() {
        Kind::PointSet => doc.to_point_set(),
        _ => doc
            .to_prob()
            .and_then(|p| PointSet::from_points(d * d, vec![p]).ok()),
    }
    .ok_or_else(|| CliError::Usage(format!("{}: invalid points", path.display())))?;
    Ok((d, set))
}

fn params(d: usize) -> Result<DimensionParams, CliError> {
    Ok(DimensionParams::new(d)?)
}

fn run_sic(ctx: &mut Context, cmd: &SicCommand) -> Result<(), CliError> {
    match cmd {
        SicCommand::Find { max_restarts } => {
            let d = ctx.dim(None)?;
            let seed = ctx.seed();
            let tol = ctx.tol(1e-20);
            let opts = SearchOptions {
                tol,
                max_restarts: *max_restarts,
                max_iter: ctx
                    .global
                    .max_iter
                    .unwrap_or(SearchOptions::default().max_iter),
            };
            match search_fiducial(d, seed, &opts) {
                Ok(out) => {
                    ctx.report.check_below("fiducial.defect", out.defect, tol);
                    ctx.report.summary("fiducial.restart", out.restart as f64);
                    if ctx.global.verify {
                        let sys = sic_from_fiducial(&out.fiducial)?;
                        add_sic_checks(&mut ctx.report, &verify_sic(&sys), TAU_SIC);
                    }
                    let meta = ctx.meta().with_tolerance("search_tol", tol);
                    ctx.write(&Document::from_fiducial(&out.fiducial, meta))?;
                }
                Err(QplexError::SearchFailed {
                    restarts,
                    best_defect,
                }) => {
                    ctx.report.check_below("fiducial.defect", best_defect, tol);
                    ctx.report
                        .note(format!("no fiducial after {restarts} restarts"));
                }
                Err(e) => return Err(e.into()),
            }
        }
        SicCommand::Verify { input } => {
            let doc = ctx.load(input, &[Kind::Fiducial, Kind::SicSystem])?;
            ctx.dim(Some(doc.dim))?;
            let tol = ctx.tol(TAU_SIC);
            if let Some(fid) = doc.to_fiducial() {
                ctx.report.summary("fiducial.defect", fid.defect());
            }
            match sic_from_doc(&doc) {
                Ok(sys) => add_sic_checks(&mut ctx.report, &verify_sic(&sys), tol),
                Err(CliError::Core(QplexError::DefectTooLarge { defect, limit })) => {
                    ctx.report.check_below("fiducial.defect", defect, limit);
                }
                Err(e) => return Err(e),
            }
        }
        SicCommand::Quasi { complement, source } => {
            let tol = ctx.tol(1e-10);
            let q: QuasiSic = if *complement {
                let sys = resolve_sic(ctx, source, None)?;
                complement_quasi_sic(&sys)?
            } else {
                build_quasi_sic(ctx.dim(None)?)?
            };
            let v = q.verify();
            ctx.report
                .check_below("quasi.trace_deviation", v.max_trace_deviation, tol);
            ctx.report.check_below(
                "quasi.diagonal_overlap_deviation",
                v.max_diagonal_overlap_deviation,
                tol,
            );
            ctx.report
                .check_below("quasi.overlap_deviation", v.max_overlap_deviation, tol);
            ctx.report
                .check_below("quasi.identity_deviation", v.identity_deviation, tol);
            ctx.report
                .check_below("quasi.gram_deviation", q.basis().max_gram_deviation(), tol);
            let min = q.min_eigenvalue();
            ctx.report.summary("quasi.min_eigenvalue", min);
            ctx.report.note(if min < -TAU_PSD {
                "some operator is not positive semi-definite"
            } else {
                "all operators are positive semi-definite"
            });
        }
    }
    Ok(())
}

fn run_rep(ctx: &mut Context, cmd: &RepCommand) -> Result<(), CliError> {
    match cmd {
        RepCommand::ToProb {
            count,
            rank,
            source,
        } => {
            let sys = resolve_sic(ctx, source, None)?;
            let d = sys_dim(&sys);
            if *count == 0 || *rank == 0 || *rank > d {
                return Err(CliError::Usage(format!(
                    "need count >= 1 and 1 <= rank <= {d}"
                )));
            }
            let seed = ctx.seed();
            let mut g = rng(seed, 0);
            let mut set = PointSet::new(d * d);
            let mut worst = 0.0_f64;
            for k in 0..*count {
                let rho = random_density_from(d, *rank, &mut g)?;
                let p = state_to_prob(&rho, &sys)?;
                let back = prob_to_operator(&p, &sys)?;
                worst = worst.max(max_abs_diff(back.matrix(), rho.matrix()));
                set.push(p, format!("s{k}"))?;
            }
            ctx.report
                .check_below("rep.reconstruction_error", worst, TAU_EIG);
            let meta = ctx.meta();
            let doc = if *count == 1 {
                Document::from_prob(d, set.get(0), meta)
            } else {
                Document::from_point_set(d, &set, meta)
            };
            ctx.write(&doc)?;
        }
        RepCommand::ToOp { input, source } => {
            let (d, set) = load_points(ctx, input)?;
            let sys = resolve_sic(ctx, source, Some(d))?;
            let triples = triple_products(&sys);
            let mut worst = f64::INFINITY;
            let mut quantum = 0;
            let mut pure = 0;
            for p in set.points() {
                let v = validate_state_vector(p, &sys, &triples)?;
                worst = worst.min(v.min_eigenvalue);
                quantum += v.is_quantum_state as usize;
                pure += v.is_pure as usize;
            }
            if set.len() == 1 {
                let op = prob_to_operator(set.get(0), &sys)?;
                ctx.say(format!("operator: {:.6}", op.matrix()));
            }
            ctx.report.summary("rep.min_eigenvalue", worst);
            ctx.report.summary("rep.pure_count", pure as f64);
            ctx.report
                .check("rep.all_quantum_states", quantum == set.len());
        }
        RepCommand::Urgleichung {
            input,
            measurement,
            source,
        } => {
            let (d, set) = load_points(ctx, input)?;
            let p = params(d)?;
            let r = match measurement {
                Some(path) => {
                    let doc = ctx.load(path, &[Kind::Measurement])?;
                    if doc.dim != d {
                        return Err(CliError::Usage(format!(
                            "measurement dimension {} does not match the state dimension {d}",
                            doc.dim
                        )));
                    }
                    doc.to_measurement()
                        .ok_or_else(|| CliError::Usage("invalid measurement".into()))?
                }
                None => {
                    let sys = resolve_sic(ctx, source, Some(d))?;
                    let seed = ctx.seed();
                    let u = haar_unitary(d, seed)?;
                    let effects: Vec<HermitianOperator> = (0..d)
                        .map(|k| HermitianOperator::outer(&u.matrix().column(k).into_owned()))
                        .collect();
                    povm_to_measurement(&effects, &sys)?
                }
            };
            let mut min_entry = f64::INFINITY;
            let mut consistent = true;
            for (k, point) in set.points().iter().enumerate() {
                let out = urgleichung(point, &r, &p)?;
                min_entry = min_entry.min(out.min_entry);
                consistent &= out.consistent;
                if set.len() == 1 {
                    for (j, q) in out.q.iter().enumerate() {
                        ctx.report.summary(&format!("q[{j}]"), *q);
                    }
                } else {
                    ctx.report.summary(&format!("min_q[{k}]"), out.min_entry);
                }
            }
            ctx.report.summary("urgleichung.min_entry", min_entry);
            ctx.report.check("urgleichung.consistent", consistent);
        }
        RepCommand::Evolve { input, source } => {
            let (d, set) = load_points(ctx, input)?;
            let sys = resolve_sic(ctx, source, Some(d))?;
            let seed = ctx.seed();
            let u = haar_unitary(d, seed)?;
            let mut worst = 0.0_f64;
            let mut images = PointSet::new(d * d);
            for (p, label) in set.points().iter().zip(set.labels()) {
                let q = evolve(p, &u, &sys)?;
                let rho = DensityOperator::new(prob_to_operator(p, &sys)?)?;
                let direct = state_to_prob(&rho.conjugate_by(&u), &sys)?;
                worst = worst.max(
                    q.iter()
                        .zip(direct.iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max),
                );
                images.push(q, label.clone())?;
            }
            ctx.report
                .check_below("evolve.conjugation_mismatch", worst, 1e-12);
            let meta = ctx.meta();
            let doc = if images.len() == 1 {
                Document::from_prob(d, images.get(0), meta)
            } else {
                Document::from_point_set(d, &images, meta)
            };
            ctx.write(&doc)?;
        }
    }
    Ok(())
}

fn sys_dim(sys: &SicSystem) -> usize {
    qplex::sic::OperatorFrame::dim(sys)
}

fn run_geom(ctx: &mut Context, cmd: &GeomCommand) -> Result<(), CliError> {
    match cmd {
        GeomCommand::CheckGerm { input } => {
            let (d, set) = load_points(ctx, input)?;
            let tol = ctx.tol(1e-12);
            let rep = is_germ(&set, &params(d)?, tol);
            ctx.report.summary("germ.min_inner", rep.min_inner);
            ctx.report.summary("germ.max_inner", rep.max_inner);
            ctx.report
                .summary("germ.violations", rep.violation_count as f64);
            for v in rep.violations.iter().take(10) {
                ctx.report.note(format!(
                    "pair ({}, {}) has inner product {:e}",
                    v.i, v.j, v.inner
                ));
            }
            ctx.report.check("germ.fundamental_inequalities", rep.pass);
        }
        GeomCommand::Polar { input, point } => {
            let (d, set) = load_points(ctx, input)?;
            let doc = ctx.load(point, &[Kind::ProbVector])?;
            if doc.dim != d {
                return Err(CliError::Usage(format!(
                    "point dimension {} does not match the set dimension {d}",
                    doc.dim
                )));
            }
            let u = doc
                .to_prob()
                .ok_or_else(|| CliError::Usage("invalid point".into()))?;
            let p = params(d)?;
            let tol = ctx.tol(1e-12);
            let v = polar_membership(&u, &set, &p, tol)?;
            ctx.report.summary("polar.min_inner", v.min_inner);
            ctx.report.summary("polar.threshold", p.lower);
            match polar_point(&u, &p) {
                Ok(s) => {
                    let geom = make_geometry(p);
                    ctx.report
                        .summary("polar_point.dist2_from_center", geom.dist2_from_center(&s));
                    ctx.say(format!("polar point: {s:?}"));
                }
                Err(QplexError::Undefined(msg)) => ctx.report.note(msg),
                Err(e) => return Err(e.into()),
            }
            ctx.report.check("polar.member", v.member);
        }
        GeomCommand::Mmd { input } => {
            let (d, set) = load_points(ctx, input)?;
            let tol = ctx.tol(1e-8);
            let sets = find_mmd_sets(&set, &params(d)?, tol);
            let largest = sets.iter().map(|s| s.len()).max().unwrap_or(0);
            ctx.report.summary("mmd.count", sets.len() as f64);
            ctx.report.summary("mmd.largest", largest as f64);
            for s in &sets {
                ctx.report.note(format!("{s:?}"));
            }
            ctx.report.check("mmd.size_at_most_d", largest <= d);
        }
        GeomCommand::Stem { input } => {
            let (d, set) = load_points(ctx, input)?;
            let tol = ctx.tol(1e-8);
            let max_iter = ctx.global.max_iter.unwrap_or(10_000);
            let geom = make_geometry(params(d)?);
            let mut counts = [0usize; 3];
            let mut worst = 0.0_f64;
            for (k, p) in set.points().iter().enumerate() {
                let v = stem_membership(p, &geom, tol, max_iter)?;
                worst = worst.max(v.residual);
                let idx = match v.status {
                    StemStatus::Member => 0,
                    StemStatus::NonMember => 1,
                    StemStatus::Indeterminate => 2,
                };
                counts[idx] += 1;
                ctx.report.note(format!(
                    "{}: {:?} residual {:.3e} lambda {:.6}",
                    set.labels()[k],
                    v.status,
                    v.residual,
                    v.lambda
                ));
            }
            ctx.report.summary("stem.members", counts[0] as f64);
            ctx.report.summary("stem.non_members", counts[1] as f64);
            ctx.report.summary("stem.indeterminate", counts[2] as f64);
            ctx.report.summary("stem.max_residual", worst);
            ctx.report.check("stem.all_members", counts[0] == set.len());
        }
    }
    Ok(())
}

fn run_sym(ctx: &mut Context, cmd: &SymCommand) -> Result<(), CliError> {
    match cmd {
        SymCommand::Stretch { input } => {
            let doc = ctx.load(input, &[Kind::Measurement])?;
            let d = ctx.dim(Some(doc.dim))?;
            let m = doc
                .to_measurement()
                .ok_or_else(|| CliError::Usage("invalid measurement".into()))?;
            let p = params(d)?;
            if m.outcomes() != p.n {
                return Err(CliError::Usage(format!(
                    "stretching needs {} outcomes, found {}",
                    p.n,
                    m.outcomes()
                )));
            }
            let r = stretch(&m, &p)?;
            let v = verify_stretched_with(&r, &p, ctx.tol(TAU_SYM));
            add_symmetry_checks(&mut ctx.report, &v);
            ctx.write(&Document::from_stretched(&r, ctx.meta()))?;
        }
        SymCommand::FromUnitary { anti, source } => {
            let sys = resolve_sic(ctx, source, None)?;
            let d = sys_dim(&sys);
            let seed = ctx.seed();
            let u = haar_unitary(d, seed)?;
            let r = if *anti {
                stretched_from_antiunitary(&u, &sys)?
            } else {
                stretched_from_unitary(&u, &sys)?
            };
            let v = verify_stretched_with(&r, &params(d)?, ctx.tol(TAU_SYM));
            add_symmetry_checks(&mut ctx.report, &v);
            ctx.write(&Document::from_stretched(&r, ctx.meta()))?;
        }
        SymCommand::Closure {
            inputs,
            count,
            products,
            source,
        } => {
            let mut sample: Vec<StretchedMatrix> = Vec::new();
            let d = if inputs.is_empty() {
                let sys = resolve_sic(ctx, source, None)?;
                let d = sys_dim(&sys);
                let seed = ctx.seed();
                let mut g = rng(seed, 0);
                for _ in 0..*count {
                    sample.push(stretched_from_unitary(
                        &haar_unitary_from(d, &mut g)?,
                        &sys,
                    )?);
                }
                d
            } else {
                let mut dim = None;
                for path in inputs {
                    let doc = ctx.load(path, &[Kind::StretchedMatrix])?;
                    let d = ctx.dim(Some(doc.dim))?;
                    if dim.is_some_and(|x| x != d) {
                        return Err(CliError::Usage(
                            "stretched matrices of different dimensions".into(),
                        ));
                    }
                    dim = Some(d);
                    sample.push(
                        doc.to_stretched()
                            .ok_or_else(|| CliError::Usage("invalid matrix".into()))?,
                    );
                }
                dim.expect("inputs is non-empty")
            };
            let seed = ctx.seed();
            let rep = group_closure_check(&sample, &params(d)?, *products, seed)?;
            ctx.report
                .summary("closure.trials", rep.trials.len() as f64);
            ctx.report
                .summary("closure.failed_trials", rep.failed_trials().count() as f64);
            for k in &rep.flagged_elements {
                ctx.report
                    .note(format!("element {k} fails the stochastic conditions"));
            }
            ctx.report.check(
                "closure.elements_stochastic",
                rep.flagged_elements.is_empty(),
            );
            ctx.report.check(
                "closure.products_stochastic",
                rep.failed_trials().next().is_none(),
            );
        }
    }
    Ok(())
}

fn run_germ(ctx: &mut Context, cmd: &GermCommand) -> Result<(), CliError> {
    match cmd {
        GermCommand::Grow { candidates, source } => {
            let d = ctx.dim(None)?;
            let seed = ctx.seed();
            let tol = ctx.tol(1e-12);
            let state = grow_sorted_qplex(d, *candidates, seed, tol)?;
            let p = params(d)?;
            let germ = is_germ(&state.accepted, &p, tol);
            ctx.report
                .summary("grow.accepted", state.accepted.len() as f64);
            ctx.report.summary("grow.rejected", state.rejected as f64);
            ctx.report.summary("grow.draws", state.draws as f64);
            ctx.report
                .summary("grow.regions", state.regions.len() as f64);
            let sys = resolve_sic(ctx, source, Some(d))?;
            let mut non_psd = 0;
            let mut worst = f64::INFINITY;
            for q in state.accepted.points() {
                let m = prob_to_operator(q, &sys)?.min_eigenvalue();
                worst = worst.min(m);
                non_psd += (m < -TAU_PSD) as usize;
            }
            ctx.report.summary("grow.non_psd_points", non_psd as f64);
            ctx.report.summary("grow.min_eigenvalue", worst);
            ctx.report.check("grow.accepted_is_germ", germ.pass);
            let meta = ctx.meta().with_tolerance("consistency", tol);
            ctx.write(&Document::from_point_set(d, &state.accepted, meta))?;
        }
        GermCommand::Lemma { samples } => {
            let d = ctx.dim(None)?;
            let seed = ctx.seed();
            let tol = ctx.tol(1e-12);
            let mut g = rng(seed, 0);
            let mut worst = f64::NEG_INFINITY;
            let mut drawn = 0;
            while drawn < *samples {
                if let Some(profile) = sample_constraint_variety(d, &mut g) {
                    worst = worst.max(spectra_lemma_check(&profile, tol)?.product);
                    drawn += 1;
                }
            }
            ctx.report.summary("lemma.samples", drawn as f64);
            if drawn > 0 {
                ctx.report
                    .check_below("lemma.max_product", worst, tol + f64::MIN_POSITIVE);
            }
            let first = spectra_lemma_check(&EigProfile::first_family(d), tol)?;
            let second = spectra_lemma_check(&EigProfile::second_family(d), tol)?;
            ctx.report.check(
                "lemma.projector_family_equality",
                first.equality == Some(EqualityFamily::Projector),
            );
            ctx.report.check(
                "lemma.reflected_family_equality",
                d == 2 || second.equality == Some(EqualityFamily::Reflected),
            );
        }
    }
    Ok(())
}

fn run_params(ctx: &mut Context, args: &ParamsArgs) -> Result<(), CliError> {
    let general = match (args.n, args.alpha) {
        (Some(n), Some(alpha)) => {
            let r = generalized_params(n, alpha)?;
            ctx.report.summary(
                "params.upper_is_twice_lower",
                r.upper_is_twice_lower as u8 as f64,
            );
            ctx.report
                .summary("params.quantum_count", r.quantum_count as u8 as f64);
            ctx.report
                .summary("params.m_max_integral", r.m_max_integral as u8 as f64);
            r.params
        }
        (None, None) => {
            let p = params(ctx.dim(None)?)?;
            let g = GeneralParams::new(p.n, p.alpha)?;
            let worst = [
                (g.beta - p.beta).abs(),
                (g.lower - p.lower).abs(),
                (g.upper - p.upper).abs(),
                (g.m_max - p.d as f64).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            ctx.report
                .check_below("params.general_matches_quantum", worst, 1e-15);
            g
        }
        _ => return Err(CliError::Usage("--n and --alpha go together".into())),
    };
    for (k, v) in [
        ("n", general.n as f64),
        ("alpha", general.alpha),
        ("beta", general.beta),
        ("lower", general.lower),
        ("upper", general.upper),
        ("m_max", general.m_max),
    ] {
        ctx.report.summary(k, v);
    }
    ctx.write(&Document::from_params(&general, ctx.meta()))?;
    Ok(())
}

fn command_name(cmd: &Command) -> String {
    let s = format!("{cmd:?}");
    let mut words = Vec::new();
    for part in s
        .split(|c: char| !c.is_alphanumeric())
        .filter(|p| !p.is_empty())
        .take(2)
    {
        words.push(part.to_lowercase());
    }
    words.join(" ")
}

/// Arguments that affect results; output destinations are dropped.
fn digest_args(args: &[String]) -> Vec<String> {
    let mut kept = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--out" || a == "--report" {
            skip = true;
        } else if !(a.starts_with("--out=") || a.starts_with("--report=")) {
            kept.push(a.clone());
        }
    }
    kept
}

/// Parses `argv` (including the program name) and runs the command.
/// Exit codes: 0 all checks passed, 1 a check failed, 2 usage or input error.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return Outcome {
                code,
                stdout: if code == 0 {
                    text.clone()
                } else {
                    String::new()
                },
                stderr: if code == 0 { String::new() } else { text },
                report: None,
            };
        }
    };
    let start = Instant::now();
    let mut ctx = Context {
        global: &cli.global,
        report: RunReport::new(command_name(&cli.command)),
        inputs: Vec::new(),
        out: String::new(),
        seed: None,
    };
    let result = match &cli.command {
        Command::Sic(c) => run_sic(&mut ctx, c),
        Command::Rep(c) => run_rep(&mut ctx, c),
        Command::Geom(c) => run_geom(&mut ctx, c),
        Command::Sym(c) => run_sym(&mut ctx, c),
        Command::Germ(c) => run_germ(&mut ctx, c),
        Command::Params(a) => run_params(&mut ctx, a),
    };
    let quiet = cli.global.quiet;
    if let Err(e) = result {
        return Outcome {
            code: 2,
            stdout: if quiet { String::new() } else { ctx.out },
            stderr: format!("error: {e}\n"),
            report: None,
        };
    }
    let mut report = ctx.report;
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.set_digest(&digest_args(&argv[1..]), &ctx.inputs);
    let mut stdout = ctx.out;
    stdout.push_str(&report.render());
    stdout.push_str(&format!(
        "{} ({} checks, {:.3} s)\n",
        if report.passed() { "passed" } else { "FAILED" },
        report.checks.len(),
        report.wall_time_s
    ));
    let mut stderr = String::new();
    if let Some(path) = &cli.global.report {
        let d = cli.global.dim.unwrap_or(0);
        if let Err(e) = save_document(
            &Document::from_report(d, &report, Meta::new(ctx.seed)),
            path,
        ) {
            stderr.push_str(&format!("error: {e}\n"));
            return Outcome {
                code: 2,
                stdout,
                stderr,
                report: Some(report),
            };
        }
    }
    Outcome {
        code: report.exit_code(),
        stdout: if quiet { String::new() } else { stdout },
        stderr,
        report: Some(report),
    }
}
