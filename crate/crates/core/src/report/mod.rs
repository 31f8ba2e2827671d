//! Command implementations behind the CLI: parameter resolution, CSV tables,
//! run manifests and figure datasets.

mod options;
mod table;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use options::{parse_family, LatticeSpec, Options};
pub use table::{log_grid, num, Table};

use crate::bounds::{
    alamouti_tight_bound, alamouti_tight_bound_extended, c_bf, c_ff, c_mimo,
    mimo_highsnr_normalized, pce_blockfading_bound, pce_fastfading_bound, pce_mimo_bound,
    BoundKind, MimoScenario,
};
use crate::criteria::{alamouti_codebook, compare_lattices, CriterionMethod, CriterionReport};
use crate::error::{Error, Result};
use crate::lattice::{points_within, Family, Lattice, NestedLatticePair, SpaceTimeCodeword, C64};
use crate::sim::{estimate_pcb, estimate_pce, SimConfig, SimResult};
use crate::zeta::{
    epstein_zeta_closed, epstein_zeta_direct, shifted_zeta_d4_closed, shifted_zeta_direct,
    shifted_zeta_series, shifted_zeta_z4_closed, ClosedRange, SeriesControl, ZetaMode,
};

pub const DEFAULT_GAMMA_MIN: f64 = 0.5;
pub const DEFAULT_GAMMA_MAX: f64 = 20.0;
pub const DEFAULT_GAMMA_POINTS: usize = 40;
pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;
const DEFAULT_S: [f64; 5] = [5.0, 6.0, 8.0, 10.0, 12.0];
const DEFAULT_RADIUS_SQ: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Zeta,
    Bound,
    Criterion,
    Simulate,
    Figure(u8),
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Zeta => f.write_str("zeta"),
            Command::Bound => f.write_str("bound"),
            Command::Criterion => f.write_str("criterion"),
            Command::Simulate => f.write_str("simulate"),
            Command::Figure(n) => write!(f, "figure {n}"),
        }
    }
}

/// Everything needed to reproduce a CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Options,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<PathBuf>,
}

/// The product of one command: a table, an optional plotting stub, and the
/// fully resolved parameters.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: Command,
    pub table: Table,
    pub gnuplot: Option<String>,
    pub params: Options,
}

/// Flags over `--config`, then the command's defaults.
pub fn resolve(command: Command, flags: &Options) -> Result<Options> {
    let mut o = flags.resolve_file()?;
    o.config = None;
    o.ne.get_or_insert(2);
    o.t.get_or_insert(2);
    if o.lattice.is_empty() {
        o.lattice = vec!["Z4".into(), "D4".into()];
    }
    let default_mu = |f: Family| match (command, f) {
        (Command::Criterion, Family::D4) => 2f64.powf(-0.25),
        _ => 1.0,
    };
    o.mu = o.lattice_specs(default_mu)?.iter().map(|s| s.mu).collect();
    match command {
        Command::Zeta => {
            if o.s.is_empty() {
                o.s = DEFAULT_S.to_vec();
            }
            o.mode.get_or_insert(ZetaMode::Validated);
            o.radius_sq.get_or_insert(DEFAULT_RADIUS_SQ);
        }
        Command::Criterion => {
            o.method.get_or_insert(CriterionMethod::ZetaClosedForm);
            if o.method == Some(CriterionMethod::DirectSum) {
                o.truncation_norm
                    .get_or_insert(crate::criteria::DEFAULT_TRUNCATION_NORM);
            }
        }
        _ => {
            o.gamma_min.get_or_insert(DEFAULT_GAMMA_MIN);
            o.gamma_max.get_or_insert(DEFAULT_GAMMA_MAX);
            o.gamma_points.get_or_insert(DEFAULT_GAMMA_POINTS);
        }
    }
    match command {
        Command::Bound => {
            if o.kind.is_empty() {
                o.kind = vec![BoundKind::MimoHighsnr, BoundKind::AlamoutiTight];
            }
            o.mode.get_or_insert(ZetaMode::Validated);
            if o.kind.iter().any(|k| {
                matches!(
                    k,
                    BoundKind::MimoLoose | BoundKind::BlockFading | BoundKind::FastFading
                )
            }) {
                o.truncation_norm
                    .get_or_insert(crate::criteria::DEFAULT_TRUNCATION_NORM);
            }
        }
        Command::Figure(_) => {
            o.mode.get_or_insert(ZetaMode::Approximate);
        }
        _ => {}
    }
    if matches!(command, Command::Simulate | Command::Figure(4)) {
        o.trials.get_or_insert(DEFAULT_TRIALS);
        o.seed.get_or_insert(DEFAULT_SEED);
    }
    Ok(o)
}

/// Runs a command with the given flags.
pub fn run(command: Command, flags: &Options) -> Result<Report> {
    let params = resolve(command, flags)?;
    let (table, gnuplot) = match command {
        Command::Zeta => (zeta_table(&params)?, None),
        Command::Bound => (bound_table(&params)?, None),
        Command::Criterion => (criterion_table(&params)?, None),
        Command::Simulate => (simulate_table(&params)?, None),
        Command::Figure(n) => {
            let t = figure_table(n, &params)?;
            let stub = gnuplot_stub(n, &t);
            (t, Some(stub))
        }
    };
    Ok(Report {
        command,
        table,
        gnuplot,
        params,
    })
}

impl Report {
    pub fn manifest(&self, outputs: Vec<PathBuf>) -> RunManifest {
        RunManifest {
            command: self.command.to_string(),
            params: self.params.clone(),
            seed: self.params.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs,
        }
    }

    /// Writes the CSV (plus stub) and its manifest. For `figure` the output
    /// path is a directory receiving `figN.csv`, `figN.gp` and
    /// `figN.manifest.json`; otherwise the manifest is `<out>.manifest.json`.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        let csv = self.table.to_csv()?;
        let (csv_path, manifest_path) = match self.command {
            Command::Figure(n) => {
                std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
                (
                    out.join(format!("fig{n}.csv")),
                    out.join(format!("fig{n}.manifest.json")),
                )
            }
            _ => {
                let mut m = out.as_os_str().to_owned();
                m.push(".manifest.json");
                (out.to_path_buf(), PathBuf::from(m))
            }
        };
        write_file(&csv_path, &csv)?;
        let mut outputs = vec![csv_path];
        if let (Some(stub), Command::Figure(n)) = (&self.gnuplot, self.command) {
            let p = out.join(format!("fig{n}.gp"));
            write_file(&p, stub)?;
            outputs.push(p);
        }
        let manifest = self.manifest(outputs.clone());
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        write_file(&manifest_path, &(json + "\n"))?;
        outputs.push(manifest_path);
        Ok(outputs)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn grid(o: &Options) -> Result<Vec<f64>> {
    log_grid(
        o.gamma_min.unwrap_or(DEFAULT_GAMMA_MIN),
        o.gamma_max.unwrap_or(DEFAULT_GAMMA_MAX),
        o.gamma_points.unwrap_or(DEFAULT_GAMMA_POINTS),
    )
}

fn specs(o: &Options) -> Result<Vec<LatticeSpec>> {
    o.lattice_specs(|_| 1.0)
}

fn ne(o: &Options) -> usize {
    o.ne.unwrap_or(2)
}

fn t(o: &Options) -> usize {
    o.t.unwrap_or(2)
}

fn mode(o: &Options) -> ZetaMode {
    o.mode.unwrap_or(ZetaMode::Validated)
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Annotation attached to a bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Note {
    /// Evaluated with the forms valid for `1/4 < gamma <= 1/2`.
    ExtendedRegime,
    /// No value: the series diverges at this SNR.
    OutOfRegime,
    /// Valid but larger than one.
    Vacuous,
}

impl Note {
    pub fn as_str(self) -> &'static str {
        match self {
            Note::ExtendedRegime => "extended_regime",
            Note::OutOfRegime => "out_of_regime",
            Note::Vacuous => "vacuous(>1)",
        }
    }
}

fn join_notes(mut notes: Vec<Note>) -> String {
    notes.sort();
    notes.dedup();
    notes
        .iter()
        .map(|n| n.as_str())
        .collect::<Vec<_>>()
        .join(";")
}

/// Tight Alamouti bound divided by `C_MIMO` for `mu * family`, using
/// `phi_{mu L}(gamma) = mu^{-8} phi_L(mu^2 gamma)` at `n_e = 2` (in general
/// `mu^{4 n_e - 2 s}` with `s = 2(n_e + 2)`).
pub fn tight_normalized(
    spec: LatticeSpec,
    gamma: f64,
    n_e: usize,
    mode: ZetaMode,
) -> Result<(Option<f64>, Vec<Note>)> {
    let g = spec.mu * spec.mu * gamma;
    let s = 2.0 * (n_e as f64 + 2.0);
    let factor = spec.mu.powf(4.0 * n_e as f64 - 2.0 * s);
    let (v, notes) = if g > 0.5 {
        (alamouti_tight_bound(spec.family, g, n_e, mode)?, vec![])
    } else if g > 0.25 {
        (
            alamouti_tight_bound_extended(spec.family, g, n_e, mode)?,
            vec![Note::ExtendedRegime],
        )
    } else {
        return Ok((None, vec![Note::OutOfRegime]));
    };
    Ok((Some(factor * v), notes))
}

/// Volume of `1/2 mu L`, the legitimate receiver's lattice.
fn vol_b(lattice: &Lattice) -> f64 {
    lattice.volume() / 16.0
}

fn zeta_table(o: &Options) -> Result<Table> {
    let mut table = Table::new([
        "s",
        "a",
        "lattice",
        "mode",
        "value",
        "direct_sum",
        "tail_bound",
        "rel_diff",
    ]);
    let ctrl = SeriesControl {
        sum_radius_sq: o.radius_sq.unwrap_or(DEFAULT_RADIUS_SQ),
        ..SeriesControl::default()
    };
    let mode = mode(o);
    for spec in specs(o)? {
        let lat = spec.lattice()?;
        for &s in &o.s {
            let (value, direct) = match o.a {
                None => (
                    epstein_zeta_closed(&lat, s)?,
                    epstein_zeta_direct(&lat, s, &ctrl)?,
                ),
                Some(a) => (
                    shifted_value(spec, &lat, s, a, mode)?,
                    shifted_zeta_direct(&lat, s, a, &ctrl)?,
                ),
            };
            let rel = (value - direct.value).abs() / value.abs();
            table.push(vec![
                num(s),
                opt(o.a),
                lat.label().to_string(),
                mode.to_string(),
                num(value),
                num(direct.value),
                num(direct.tail_bound),
                num(rel),
            ]);
        }
    }
    Ok(table)
}

fn shifted_value(spec: LatticeSpec, lat: &Lattice, s: f64, a: f64, mode: ZetaMode) -> Result<f64> {
    match mode {
        ZetaMode::Approximate => {
            if spec.mu != 1.0 {
                return Err(Error::Config(
                    "the approximate shifted-zeta forms are defined for unscaled lattices only"
                        .into(),
                ));
            }
            let range = if a < 2.0 {
                ClosedRange::Narrow
            } else {
                ClosedRange::Wide
            };
            match spec.family {
                Family::Z4 => shifted_zeta_z4_closed(s, a, range, mode),
                Family::D4 => shifted_zeta_d4_closed(s, a, range, mode),
            }
        }
        ZetaMode::Validated => {
            let mut ctrl = SeriesControl::for_family(spec.family);
            let q = (a / (spec.mu * spec.mu)).floor() + 1.0;
            if ctrl.shell_cut <= q {
                ctrl = ctrl.with_shell_cut(q.max(4.0));
            }
            Ok(shifted_zeta_series(lat, s, a, &ctrl, mode)?.value)
        }
    }
}

/// Complex 2-vectors `(x1, x2)` of the lattice points with `|x|^2 <= max_norm`,
/// zero included.
fn complex_pairs(lat: &Lattice, max_norm: f64) -> Result<Vec<Vec<C64>>> {
    if lat.ambient_dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: lat.ambient_dim(),
        });
    }
    Ok(points_within(lat, max_norm)?
        .into_iter()
        .map(|(_, p)| vec![C64::new(p[0], p[1]), C64::new(p[2], p[3])])
        .collect())
}

struct BoundPoint {
    value: Option<f64>,
    normalized: Option<f64>,
    notes: Vec<Note>,
}

fn require_alamouti(t: usize) -> Result<()> {
    if t != 2 {
        return Err(Error::Config(format!(
            "Alamouti codewords need T = 2, got {t}"
        )));
    }
    Ok(())
}

/// One bound kind for one lattice over the grid.
fn bound_curve(
    kind: BoundKind,
    spec: LatticeSpec,
    gammas: &[f64],
    o: &Options,
) -> Result<Vec<BoundPoint>> {
    let lat = spec.lattice()?;
    let (n_e, t, mode) = (ne(o), t(o), mode(o));
    let vb = vol_b(&lat);
    let trunc = o
        .truncation_norm
        .unwrap_or(crate::criteria::DEFAULT_TRUNCATION_NORM);
    let finish = |c: f64, normalized: Option<f64>, mut notes: Vec<Note>| {
        let value = normalized.map(|n| c * n);
        if value.is_some_and(|v| v > 1.0) {
            notes.push(Note::Vacuous);
        }
        BoundPoint {
            value,
            normalized,
            notes,
        }
    };
    match kind {
        BoundKind::MimoHighsnr => {
            require_alamouti(t)?;
            let crit = crate::criteria::criterion_alamouti_closed(&lat, n_e)?;
            gammas
                .iter()
                .map(|&g| {
                    let sc = MimoScenario::alamouti(n_e, g, vb)?;
                    Ok(finish(
                        c_mimo(&sc)?,
                        Some(mimo_highsnr_normalized(crit, &sc)),
                        vec![],
                    ))
                })
                .collect()
        }
        BoundKind::MimoLoose => {
            require_alamouti(t)?;
            let mut book = vec![SpaceTimeCodeword::zero(2, 2)];
            book.extend(alamouti_codebook(&lat, trunc)?);
            gammas
                .iter()
                .map(|&g| {
                    let sc = MimoScenario::alamouti(n_e, g, vb)?;
                    let b = pce_mimo_bound(&book, &sc)?;
                    Ok(finish(c_mimo(&sc)?, Some(b.normalized), vec![]))
                })
                .collect()
        }
        BoundKind::AlamoutiTight => {
            require_alamouti(t)?;
            gammas
                .iter()
                .map(|&g| {
                    let sc = MimoScenario::alamouti(n_e, g, vb)?;
                    let (v, notes) = tight_normalized(spec, g, n_e, mode)?;
                    Ok(finish(c_mimo(&sc)?, v, notes))
                })
                .collect()
        }
        BoundKind::BlockFading => {
            let pairs = complex_pairs(&lat, trunc)?;
            let norms: Vec<Vec<f64>> = pairs
                .iter()
                .map(|c| c.iter().map(|z| z.norm_sqr()).collect())
                .collect();
            gammas
                .iter()
                .map(|&g| {
                    let b = pce_blockfading_bound(&norms, 2, t, g, vb)?;
                    Ok(finish(c_bf(2, t, vb), Some(b.normalized), vec![]))
                })
                .collect()
        }
        BoundKind::FastFading => {
            let pairs = complex_pairs(&lat, trunc)?;
            gammas
                .iter()
                .map(|&g| {
                    let b = pce_fastfading_bound(&pairs, g, vb)?;
                    Ok(finish(c_ff(2, vb), Some(b.normalized), vec![]))
                })
                .collect()
        }
    }
}

fn bound_table(o: &Options) -> Result<Table> {
    let gammas = grid(o)?;
    let mut table = Table::new(["gamma", "lattice", "kind", "value", "value_over_C", "note"]);
    for spec in specs(o)? {
        let label = spec.label();
        for &kind in &o.kind {
            let curve = bound_curve(kind, spec, &gammas, o)?;
            for (g, p) in gammas.iter().zip(curve) {
                table.push(vec![
                    num(*g),
                    label.clone(),
                    kind.to_string(),
                    opt(p.value),
                    opt(p.normalized),
                    join_notes(p.notes),
                ]);
            }
        }
    }
    Ok(table)
}

fn criterion_table(o: &Options) -> Result<Table> {
    let n_e = ne(o);
    require_alamouti(t(o))?;
    let reports = specs(o)?
        .into_iter()
        .map(|spec| {
            let lat = spec.lattice()?;
            match o.method.unwrap_or(CriterionMethod::ZetaClosedForm) {
                CriterionMethod::ZetaClosedForm => CriterionReport::alamouti_closed(&lat, n_e),
                CriterionMethod::DirectSum => CriterionReport::alamouti_direct(
                    &lat,
                    n_e,
                    o.truncation_norm
                        .unwrap_or(crate::criteria::DEFAULT_TRUNCATION_NORM),
                ),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let ranking = compare_lattices(&reports)?;
    let best = ranking.order[0].value;
    let mut table = Table::new([
        "rank",
        "lattice",
        "channel_kind",
        "method",
        "value",
        "truncation_norm",
        "volume",
        "ratio_to_best",
    ]);
    for (i, r) in ranking.order.iter().enumerate() {
        table.push(vec![
            (i + 1).to_string(),
            r.lattice_label.clone(),
            r.channel_kind.to_string(),
            r.method.to_string(),
            num(r.value),
            opt(r.truncation_norm),
            num(r.volume),
            num(r.value / best),
        ]);
    }
    Ok(table)
}

/// `1/2 mu L` over `mu L`.
pub fn sim_config(spec: LatticeSpec, o: &Options, gammas: Vec<f64>) -> Result<SimConfig> {
    let trials = o.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = o.seed.unwrap_or(DEFAULT_SEED);
    let mut cfg = SimConfig::for_family(spec.family, ne(o), gammas, trials, seed);
    if spec.mu != 1.0 {
        let coarse = spec.lattice()?;
        let fine = coarse.scaled(0.5)?;
        cfg.pair = NestedLatticePair::new(fine, coarse)?;
    }
    cfg.t = t(o);
    cfg.threads = o.threads;
    cfg.validate()?;
    Ok(cfg)
}

fn push_sim_rows(table: &mut Table, receiver: &str, res: &SimResult) {
    for p in &res.points {
        let c = &p.correct;
        table.push(vec![
            receiver.to_string(),
            res.coarse.clone(),
            num(p.gamma),
            c.trials.to_string(),
            c.successes.to_string(),
            num(c.estimate),
            num(c.half_width),
            num(c.low),
            num(c.high),
            format!("{:?}", c.method).to_lowercase(),
        ]);
    }
}

fn simulate_table(o: &Options) -> Result<Table> {
    let gammas = grid(o)?;
    let mut table = Table::new([
        "receiver",
        "lattice",
        "gamma",
        "trials",
        "successes",
        "estimate",
        "half_width",
        "ci_low",
        "ci_high",
        "ci_method",
    ]);
    for spec in specs(o)? {
        let cfg = sim_config(spec, o, gammas.clone())?;
        push_sim_rows(&mut table, "eve", &estimate_pce(&cfg)?);
        if let Some(gb) = o.bob_gamma {
            push_sim_rows(&mut table, "bob", &estimate_pcb(&cfg, gb)?);
        }
    }
    Ok(table)
}

fn figure_table(n: u8, o: &Options) -> Result<Table> {
    let gammas = grid(o)?;
    let specs = specs(o)?;
    let labels: Vec<String> = specs.iter().map(|s| s.label()).collect();
    let mut header = vec!["gamma".to_string()];
    // per lattice: a list of columns, each one value per grid point
    let mut columns: Vec<Vec<String>> = Vec::new();
    let mut notes: Vec<Vec<Note>> = vec![Vec::new(); gammas.len()];
    let mut add = |name: String, pts: Vec<BoundPoint>, absolute: bool, header: &mut Vec<String>| {
        header.push(name);
        let mut col = Vec::with_capacity(pts.len());
        for (i, p) in pts.into_iter().enumerate() {
            col.push(opt(if absolute { p.value } else { p.normalized }));
            notes[i].extend(
                p.notes
                    .into_iter()
                    .filter(|n| absolute || *n != Note::Vacuous),
            );
        }
        columns.push(col);
    };
    match n {
        1 => {
            for (spec, l) in specs.iter().zip(&labels) {
                let c = bound_curve(BoundKind::MimoHighsnr, *spec, &gammas, o)?;
                add(format!("{l}_loose_over_C"), c, false, &mut header);
            }
        }
        2 => {
            for (spec, l) in specs.iter().zip(&labels) {
                let c = bound_curve(BoundKind::AlamoutiTight, *spec, &gammas, o)?;
                add(format!("{l}_tight_over_C"), c, false, &mut header);
            }
        }
        3 => {
            for (spec, l) in specs.iter().zip(&labels) {
                let c = bound_curve(BoundKind::MimoHighsnr, *spec, &gammas, o)?;
                add(format!("{l}_loose_over_C"), c, false, &mut header);
                let c = bound_curve(BoundKind::AlamoutiTight, *spec, &gammas, o)?;
                add(format!("{l}_tight_over_C"), c, false, &mut header);
            }
        }
        4 => {
            let mut sims = Vec::new();
            for (spec, l) in specs.iter().zip(&labels) {
                let c = bound_curve(BoundKind::AlamoutiTight, *spec, &gammas, o)?;
                add(format!("{l}_tight"), c, true, &mut header);
                sims.push((
                    l.clone(),
                    estimate_pce(&sim_config(*spec, o, gammas.clone())?)?,
                ));
            }
            for (l, res) in sims {
                header.push(format!("{l}_mc"));
                header.push(format!("{l}_mc_half_width"));
                columns.push(res.points.iter().map(|p| num(p.correct.estimate)).collect());
                columns.push(
                    res.points
                        .iter()
                        .map(|p| num(p.correct.half_width))
                        .collect(),
                );
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown figure {other} (expected 1-4)"
            )))
        }
    }
    header.push("note".into());
    let mut table = Table::new(header);
    for (i, g) in gammas.iter().enumerate() {
        let mut row = vec![num(*g)];
        row.extend(columns.iter().map(|c| c[i].clone()));
        row.push(join_notes(notes[i].clone()));
        table.push(row);
    }
    Ok(table)
}

/// A gnuplot script plotting every column of `figN.csv` against gamma.
pub fn gnuplot_stub(n: u8, table: &Table) -> String {
    let last = table.header.len() - 1; // skip the note column
    let ylabel = if n == 4 {
        "probability"
    } else {
        "bound / C_MIMO"
    };
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale y\n\
         set xlabel 'gamma_e'\n\
         set ylabel '{ylabel}'\n\
         plot for [i=2:{last}] 'fig{n}.csv' using 1:i with linespoints\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> Options {
        Options::default()
    }

    fn col(t: &Table, name: &str) -> Vec<String> {
        let j = t.column(name).unwrap();
        t.rows.iter().map(|r| r[j].clone()).collect()
    }

    #[test]
    fn defaults_depend_on_command() {
        let f = resolve(Command::Figure(2), &flags()).unwrap();
        assert_eq!(f.mode, Some(ZetaMode::Approximate));
        assert_eq!(f.gamma_points, Some(40));
        let b = resolve(Command::Bound, &flags()).unwrap();
        assert_eq!(b.mode, Some(ZetaMode::Validated));
        let c = resolve(Command::Criterion, &flags()).unwrap();
        assert_eq!(c.mu, vec![1.0, 2f64.powf(-0.25)]);
        let s = resolve(Command::Simulate, &flags()).unwrap();
        assert_eq!(
            (s.trials, s.seed),
            (Some(DEFAULT_TRIALS), Some(DEFAULT_SEED))
        );
    }

    #[test]
    fn zeta_rows() {
        let o = Options {
            lattice: vec!["Z4".into()],
            s: vec![8.0],
            radius_sq: Some(200.0),
            ..flags()
        };
        let t = run(Command::Zeta, &o).unwrap().table;
        assert_eq!(t.rows.len(), 1);
        let v: f64 = col(&t, "value")[0].parse().unwrap();
        assert!((v - 8.099191).abs() < 1e-5);
        assert_eq!(col(&t, "mode")[0], "validated");
    }

    #[test]
    fn shifted_zeta_rows() {
        let o = Options {
            lattice: vec!["D4".into()],
            s: vec![8.0],
            a: Some(0.5),
            radius_sq: Some(200.0),
            ..flags()
        };
        let t = run(Command::Zeta, &o).unwrap().table;
        let rel: f64 = col(&t, "rel_diff")[0].parse().unwrap();
        assert!(rel < 1e-8, "{rel}");
    }

    #[test]
    fn criterion_ranking() {
        let t = run(Command::Criterion, &flags()).unwrap().table;
        assert_eq!(col(&t, "rank"), vec!["1", "2"]);
        assert!(col(&t, "lattice")[0].contains("D4"));
        let gain: f64 = col(&t, "ratio_to_best")[1].parse().unwrap();
        assert!((gain - 5.375).abs() < 1e-9);

        let unequal = Options {
            mu: vec![1.0],
            ..flags()
        };
        assert!(matches!(
            run(Command::Criterion, &unequal),
            Err(Error::IncomparableReports(_))
        ));
    }

    #[test]
    fn bound_rows_flag_regimes() {
        let o = Options {
            lattice: vec!["Z4".into()],
            kind: vec![BoundKind::AlamoutiTight],
            gamma_min: Some(0.2),
            gamma_max: Some(2.0),
            gamma_points: Some(5),
            ..flags()
        };
        let t = run(Command::Bound, &o).unwrap().table;
        let notes = col(&t, "note");
        assert_eq!(notes[0], "out_of_regime");
        assert_eq!(col(&t, "value")[0], "");
        assert!(notes.iter().any(|n| n.contains("extended_regime")));
        assert!(col(&t, "value").last().unwrap().parse::<f64>().is_ok());
    }

    #[test]
    fn scaled_tight_bound_matches_direct_evaluation() {
        let mu = 2f64.powf(-0.25);
        let spec = LatticeSpec {
            family: Family::D4,
            mu,
        };
        let lat = spec.lattice().unwrap();
        let g = 3.0;
        let (v, _) = tight_normalized(spec, g, 2, ZetaMode::Validated).unwrap();
        let ctrl = SeriesControl::for_family(Family::D4);
        let z = shifted_zeta_series(&lat, 8.0, 1.0 / g, &ctrl, ZetaMode::Validated)
            .unwrap()
            .value;
        let want = g.powi(-4) * z;
        assert!((v.unwrap() / want - 1.0).abs() < 1e-10);
    }

    #[test]
    fn all_bound_kinds_run() {
        let o = Options {
            lattice: vec!["D4".into()],
            kind: BoundKind::ALL.to_vec(),
            gamma_points: Some(3),
            truncation_norm: Some(8.0),
            ..flags()
        };
        let t = run(Command::Bound, &o).unwrap().table;
        assert_eq!(t.rows.len(), 15);
        for v in col(&t, "value_over_C") {
            assert!(v.parse::<f64>().unwrap() > 0.0);
        }
    }

    #[test]
    fn figures_have_expected_columns() {
        let o = Options {
            gamma_points: Some(4),
            ..flags()
        };
        let f1 = run(Command::Figure(1), &o).unwrap();
        assert_eq!(
            f1.table.header,
            ["gamma", "Z4_loose_over_C", "D4_loose_over_C", "note"]
        );
        let f3 = run(Command::Figure(3), &o).unwrap();
        assert_eq!(f3.table.header.len(), 6);
        assert!(f3.gnuplot.unwrap().contains("fig3.csv"));
        assert!(run(Command::Figure(5), &o).is_err());
    }

    #[test]
    fn bad_grid_is_rejected() {
        let o = Options {
            gamma_min: Some(5.0),
            gamma_max: Some(1.0),
            ..flags()
        };
        assert!(run(Command::Bound, &o).is_err());
        let t3 = Options {
            t: Some(3),
            ..flags()
        };
        assert!(run(Command::Criterion, &t3).is_err());
    }

    #[test]
    fn write_and_replay() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("crit.csv");
        let o = Options {
            out: Some(out.clone()),
            ..flags()
        };
        let rep = run(Command::Criterion, &o).unwrap();
        let files = rep.write(&out).unwrap();
        assert_eq!(files.len(), 2);
        let first = std::fs::read_to_string(&out).unwrap();
        let replay = Options {
            config: Some(files[1].clone()),
            ..flags()
        };
        let again = run(Command::Criterion, &replay)
            .unwrap()
            .table
            .to_csv()
            .unwrap();
        assert_eq!(first, again);
    }
}
