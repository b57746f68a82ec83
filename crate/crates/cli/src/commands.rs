use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use logharm::analysis::{
    boundary_trace, clh_margins_on_real_axis, coeff_certificate, conjecture_scan, convex_margin, covering,
    growth_distortion_certificate, identity_check, jacobian_margin, starlike_margin, sufficient_starlike, table1,
    GridSpec, IdentityKind, MarginReport, ScanConfig, BOUND_NAMES,
};
use logharm::fieldmap::{catalog, AnalyticMap, CatalogEntry, CatalogParams, CATALOG_NAMES};
use logharm::render::{render_raster, sample_curves, svg_document, Bounds, RenderSpec, Viewport};
use logharm::shear::{construct_clh, construct_numeric, construct_quadrature, construct_series, parse_dilatation, parse_starlike};
use logharm::{Complex64, LogHarmonicMap64, Mapping};
use serde_json::{json, Value};

use crate::{
    BoundsArgs, CatalogArgs, Check, CoeffsArgs, Command, Common, ConstructArgs, ExploreArgs, Format, GridArgs, MapArgs,
    Method, RenderArgs, Table1Args, TraceArgs, VerifyArgs,
};

/// Runs one subcommand; `Ok(false)` means a checked property failed.
pub fn run(cmd: &Command) -> Result<bool> {
    let config = serde_json::to_value(cmd)?;
    match cmd {
        Command::Catalog(a) => catalog_cmd(a, &config),
        Command::Construct(a) => construct_cmd(a, &config),
        Command::Coeffs(a) => coeffs_cmd(a, &config),
        Command::Verify(a) => verify_cmd(a, &config),
        Command::Table1(a) => table1_cmd(a, &config),
        Command::Bounds(a) => bounds_cmd(a, &config),
        Command::Trace(a) => trace_cmd(a, &config),
        Command::Render(a) => render_cmd(a, &config),
        Command::Explore(a) => explore_cmd(a, &config),
    }
}

fn header(config: &Value) -> String {
    format!("# logharm {config}\n")
}

/// Text to stdout, JSON to `--out` when given.
fn emit(common: &Common, config: &Value, text: &str, report: Value) -> Result<()> {
    print!("{}{}", header(config), text);
    if let Some(path) = &common.out {
        let doc = json!({ "config": config, "report": report });
        write_file(path, serde_json::to_string_pretty(&doc)?.as_bytes())?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn parse_lambda(s: &str) -> Result<Complex64> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("bad --lambda `{s}`: {e}"))?;
    match parts[..] {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => bail!("--lambda takes `re` or `re,im`"),
    }
}

fn params(m: &MapArgs) -> Result<CatalogParams> {
    Ok(CatalogParams { alpha: m.alpha, lambda: parse_lambda(&m.lambda)?, p: m.p })
}

/// A catalog entry or a sheared map.
enum Loaded {
    Entry(CatalogEntry<f64>),
    Sheared(LogHarmonicMap64),
}

impl Loaded {
    fn mapping(&self) -> &dyn Mapping<f64> {
        match self {
            Loaded::Entry(e) => e,
            Loaded::Sheared(m) => m,
        }
    }

    fn log_harmonic(&self) -> Option<&LogHarmonicMap64> {
        match self {
            Loaded::Entry(e) => e.as_log_harmonic(),
            Loaded::Sheared(m) => Some(m),
        }
    }
}

fn load(m: &MapArgs) -> Result<Loaded> {
    let p = params(m)?;
    match (&m.map, &m.phi) {
        (Some(_), Some(_)) => bail!("give either --map or --phi, not both"),
        (Some(name), None) => Ok(Loaded::Entry(catalog(name, &p)?)),
        (None, Some(phi)) => {
            let phi = parse_starlike(phi, &p)?;
            let mu = parse_dilatation(m.mu.as_deref().unwrap_or("0"))?;
            Ok(Loaded::Sheared(construct_quadrature(&phi, &mu)?.with_label("sheared")))
        }
        (None, None) => bail!("no map given: use --map <name> or --phi <spec>"),
    }
}

fn grid(g: &GridArgs) -> Result<GridSpec> {
    let radii = match &g.radii {
        None => GridSpec::default().radii,
        Some(s) => s
            .split(',')
            .map(|r| r.trim().parse::<f64>().map_err(|e| anyhow!("bad radius `{r}`: {e}")))
            .collect::<Result<_>>()?,
    };
    Ok(GridSpec::new(radii, g.angles)?)
}

fn c(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn coeff_table(a: &[Complex64], b: &[Complex64]) -> String {
    let mut s = format!("{:>4} {:>24} {:>24}\n", "n", "a_n", "b_n");
    for (n, (x, y)) in a.iter().zip(b).enumerate() {
        let _ = writeln!(s, "{:>4} {:>24} {:>24}", n + 1, format!("{:.12}", x), format!("{:.12}", y));
    }
    s
}

fn catalog_cmd(a: &CatalogArgs, config: &Value) -> Result<bool> {
    if a.map.map.is_none() && a.map.phi.is_none() {
        let mut text = String::new();
        for (name, what) in CATALOG_NAMES {
            let _ = writeln!(text, "{name:<16} {what}");
        }
        let list: Vec<Value> = CATALOG_NAMES.iter().map(|(n, d)| json!({ "name": n, "description": d })).collect();
        emit(&a.common, config, &text, Value::Array(list))?;
        return Ok(true);
    }
    let loaded = load(&a.map)?;
    let map = loaded.mapping();
    let kind = match &loaded {
        Loaded::Entry(CatalogEntry::LogHarmonic(_)) | Loaded::Sheared(_) => "log-harmonic",
        Loaded::Entry(CatalogEntry::Poly(_)) => "polynomial in z and conj(z)",
        Loaded::Entry(CatalogEntry::Analytic(_)) => "analytic",
    };
    let singular: Vec<[f64; 2]> = map.singular_points().into_iter().map(c).collect();
    let mut text = format!("{:<10} {}\n{:<10} {}\n{:<10} {:?}\n", "label", map.label(), "kind", kind, "singular", singular);
    let mut report = json!({ "label": map.label(), "kind": kind, "singular_points": singular });
    if let Some(lh) = loaded.log_harmonic() {
        let (x, y) = lh.coeffs(a.order)?;
        text.push_str(&coeff_table(&x, &y));
        report["a"] = json!(x.iter().copied().map(c).collect::<Vec<_>>());
        report["b"] = json!(y.iter().copied().map(c).collect::<Vec<_>>());
    }
    emit(&a.common, config, &text, report)?;
    Ok(true)
}

fn check_radii(r_max: f64) -> Vec<f64> {
    let mut radii: Vec<f64> = (1..).map(|k| k as f64 / 10.0).take_while(|r| *r <= r_max + 1e-12).collect();
    if radii.is_empty() {
        radii.push(r_max);
    }
    radii
}

fn construct_cmd(a: &ConstructArgs, config: &Value) -> Result<bool> {
    if !(a.check_radius > 0.0 && a.check_radius < 1.0) {
        bail!("--check-radius must lie in (0, 1)");
    }
    let p = CatalogParams { alpha: a.alpha, ..Default::default() };
    let phi = parse_starlike::<f64>(&a.phi, &p)?;
    let mu = parse_dilatation::<f64>(&a.mu)?;
    let map = match a.method {
        Method::Series => construct_series(&phi, &mu, a.order)?,
        Method::Quadrature => construct_quadrature(&phi, &mu)?,
    };
    let (x, y) = map.coeffs(a.order)?;
    let (mut mu_err, mut g_err) = (0.0f64, 0.0f64);
    for r in check_radii(a.check_radius) {
        for k in 0..64 {
            let z = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / 64.0);
            mu_err = mu_err.max((map.dilatation(z)? - mu.value(z)?).norm());
            g_err = g_err.max((map.g().value(z)? - construct_numeric(&phi, &mu, z)?).norm());
        }
    }
    let pass = mu_err <= a.tol && g_err <= a.tol;
    let mut text = coeff_table(&x, &y);
    let _ = writeln!(text, "max |mu_f - mu| on r <= {}: {:.3e}", a.check_radius, mu_err);
    let _ = writeln!(text, "max |g - g_quadrature| on r <= {}: {:.3e}", a.check_radius, g_err);
    let _ = writeln!(text, "result: {}", verdict(pass));
    let report = json!({
        "a": x.iter().copied().map(c).collect::<Vec<_>>(),
        "b": y.iter().copied().map(c).collect::<Vec<_>>(),
        "dilatation_error": mu_err,
        "g_error": g_err,
        "pass": pass,
    });
    emit(&a.common, config, &text, report)?;
    Ok(pass)
}

fn parse_coeffs(s: &str) -> Result<Vec<Complex64>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(s).map_err(|e| anyhow!("coefficients must be [[re, im], ...]: {e}"))?;
    Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

fn coeffs_cmd(a: &CoeffsArgs, config: &Value) -> Result<bool> {
    let alpha = a.map.alpha;
    if a.a.is_some() || a.b.is_some() {
        let x = parse_coeffs(a.a.as_deref().unwrap_or("[]"))?;
        let y = parse_coeffs(a.b.as_deref().unwrap_or("[]"))?;
        let rep = sufficient_starlike(&x, &y, alpha, Some(&grid(&a.grid)?))?;
        let pass = rep.margin.as_ref().is_none_or(|m| m.passes(a.tol));
        let mut text = format!("sum n|a_n - b_n| = {:.12} (1 - alpha = {})\ncondition holds: {}\n", rep.sum, 1.0 - alpha, rep.holds);
        if let Some(m) = &rep.margin {
            let _ = writeln!(text, "{m}");
        }
        let _ = writeln!(text, "result: {}", verdict(pass));
        emit(&a.common, config, &text, serde_json::to_value(&rep)?)?;
        return Ok(pass);
    }
    let loaded = load(&a.map)?;
    let lh = loaded.log_harmonic().ok_or_else(|| anyhow!("coefficients need a log-harmonic map"))?;
    let cert = coeff_certificate(lh, alpha, a.order)?;
    let (x, y) = lh.coeffs(a.order)?;
    let mut text = format!("{:>4} {:>24} {:>24} {:>16}\n", "n", "a_n", "b_n", "n|a_n-b_n|/2(1-a)");
    for n in 0..cert.order {
        let _ = writeln!(
            text,
            "{:>4} {:>24} {:>24} {:>16.12}",
            n + 1,
            format!("{:.12}", x[n]),
            format!("{:.12}", y[n]),
            cert.ratios[n]
        );
    }
    let _ = writeln!(text, "max ratio {:.15} at n = {}\nresult: {}", cert.max, cert.argmax, verdict(cert.passes));
    emit(&a.common, config, &text, serde_json::to_value(&cert)?)?;
    Ok(cert.passes)
}

fn verify_cmd(a: &VerifyArgs, config: &Value) -> Result<bool> {
    let loaded = load(&a.map)?;
    let map = loaded.mapping();
    let g = grid(&a.grid)?;
    let alpha = a.map.alpha;
    let (report, pass): (MarginReport, bool) = match a.check {
        Check::Starlike | Check::Convex | Check::Jacobian => {
            let rep = match a.check {
                Check::Starlike => starlike_margin(map, &g, alpha)?,
                Check::Convex => convex_margin(map, &g, alpha)?,
                _ => jacobian_margin(map, &g)?,
            };
            let ok = rep.passes(a.tol.unwrap_or(1e-6));
            (rep, ok)
        }
        Check::Identity => {
            let tol = a.tol.unwrap_or(1e-9);
            let rep = match &loaded {
                Loaded::Entry(CatalogEntry::Poly(_)) if a.map.map.as_deref() == Some("lambda") => {
                    let phi = catalog::<f64>("lambda", &CatalogParams { p: 1, ..params(&a.map)? })?;
                    identity_check(map, &phi, IdentityKind::Convex, &g)?
                }
                _ => {
                    let lh = loaded
                        .log_harmonic()
                        .ok_or_else(|| anyhow!("the identity check needs a log-harmonic map or the lambda family"))?;
                    let phi = AnalyticMap::new(lh.associated_phi(), "phi");
                    identity_check(map, &phi, IdentityKind::Starlike, &g)?
                }
            };
            let ok = rep.max <= tol;
            (rep, ok)
        }
    };
    let text = format!("{report}\nresult: {}\n", verdict(pass));
    emit(&a.common, config, &text, json!({ "margin": report, "pass": pass }))?;
    Ok(pass)
}

fn table1_cmd(a: &Table1Args, config: &Value) -> Result<bool> {
    let mut csv = String::from("r,theta,V\n");
    for (r, t, v) in table1()? {
        let _ = writeln!(csv, "{r},{t},{v:.6}");
    }
    print!("{}{}", header(config), csv);
    if let Some(path) = &a.common.out {
        write_file(path, csv.as_bytes())?;
    }
    Ok(true)
}

fn bounds_cmd(a: &BoundsArgs, config: &Value) -> Result<bool> {
    let mu = parse_dilatation::<f64>(&a.mu)?;
    let clh = construct_clh(&mu, a.order)?;
    let g = grid(&a.grid)?;
    let rep = growth_distortion_certificate(&clh, &g)?;
    let pass = rep.passes(a.tol);
    let mut text = format!("{:<8} {:>22} {:>24}\n", "bound", "min relative margin", "at");
    for item in &rep.items {
        let _ = writeln!(
            text,
            "{:<8} {:>22.12e} {:>24}",
            item.name,
            item.min_margin,
            format!("({:.6}, {:.6})", item.argmin[0], item.argmin[1])
        );
    }
    let _ = writeln!(text, "points: {} evaluated, {} degenerate", rep.evaluated, rep.degenerate);
    let mut report = json!({ "growth": rep, "pass": pass });
    if a.real_axis {
        let rows = clh_margins_on_real_axis(&clh, &g.radii)?;
        let _ = writeln!(text, "margins at z = r:\n{:>6} {}", "r", BOUND_NAMES.map(|n| format!("{n:>14}")).join(""));
        for (r, m) in &rows {
            let _ = writeln!(text, "{r:>6} {}", m.map(|v| format!("{v:>14.3e}")).join(""));
        }
        report["real_axis"] = json!(rows);
    }
    let _ = writeln!(text, "result: {}", verdict(pass));
    emit(&a.common, config, &text, report)?;
    Ok(pass)
}

fn trace_cmd(a: &TraceArgs, config: &Value) -> Result<bool> {
    let loaded = load(&a.map)?;
    let map = loaded.mapping();
    let trace = boundary_trace(map, a.r, a.angles)?;
    let cover = covering(map, a.r, a.angles)?;
    let min_re = trace.iter().map(|p| p.w[0]).fold(f64::INFINITY, f64::min);
    let max_im = trace.iter().map(|p| p.w[1].abs()).fold(0.0, f64::max);
    let text = format!(
        "points {} of {} at r = {}\nmin Re w {:.12}\nmax |Im w| {:.12}\nmin |w| {:.12} at theta = {:.9} (covering proxy, not a proof of covering)\n",
        trace.len(),
        a.angles,
        a.r,
        min_re,
        max_im,
        cover.radius,
        cover.theta
    );
    print!("{}{}", header(config), text);
    if let Some(path) = &a.common.out {
        let mut csv = String::from("theta,re,im\n");
        for p in &trace {
            let _ = writeln!(csv, "{},{},{}", p.theta, p.w[0], p.w[1]);
        }
        write_file(path, csv.as_bytes())?;
    }
    Ok(true)
}

fn parse_viewport(s: &str) -> Result<Bounds> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("bad --viewport `{s}`: {e}"))?;
    let [x0, x1, y0, y1] = v[..] else { bail!("--viewport takes x_min,x_max,y_min,y_max") };
    Ok(Bounds::new(x0, x1, y0, y1)?)
}

fn parse_resolution(s: &str) -> Result<(usize, usize)> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| anyhow!("--resolution takes WIDTHxHEIGHT"))?;
    Ok((w.trim().parse()?, h.trim().parse()?))
}

fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || "_-.".contains(c) { c } else { '_' }).collect()
}

fn render_cmd(a: &RenderArgs, config: &Value) -> Result<bool> {
    let loaded = load(&a.map)?;
    let map = loaded.mapping();
    let spec = RenderSpec {
        samples: a.samples,
        viewport: match &a.viewport {
            Some(v) => Viewport::Explicit(parse_viewport(v)?),
            None => Viewport::Auto,
        },
        circle_width: a.circle_width,
        ray_width: a.ray_width,
        ..RenderSpec::with_counts(a.circles, a.rays, a.r_max)
    };
    let ext = match a.format {
        Format::Svg => "svg",
        Format::Ppm => "ppm",
    };
    let path = a.common.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}_{}.{ext}", file_stem(&map.label()), a.r_max)));
    let mut text = String::new();
    match a.format {
        Format::Svg => {
            let picture = sample_curves(map, &spec)?;
            write_file(&path, svg_document(&picture, &spec).as_bytes())?;
            let _ = writeln!(text, "wrote {} ({} curves)", path.display(), picture.curves.len());
            for w in &picture.warnings {
                let _ = writeln!(text, "warning: {w}");
            }
        }
        Format::Ppm => {
            let (w, h) = parse_resolution(&a.resolution)?;
            let raster = render_raster(map, &spec, w, h)?;
            write_file(&path, &raster.to_ppm())?;
            let _ = writeln!(text, "wrote {} ({w}x{h}, {:.4} filled)", path.display(), raster.filled_fraction());
        }
    }
    print!("{}{}", header(config), text);
    Ok(true)
}

fn explore_cmd(a: &ExploreArgs, config: &Value) -> Result<bool> {
    let cfg = ScanConfig {
        trials: a.trials,
        k_phi: a.k_phi,
        k_mu: a.k_mu,
        order: a.order,
        r_cover: a.r_cover,
        angles: a.angles,
        seed: a.seed,
    };
    if !(cfg.r_cover > 0.0 && cfg.r_cover < 1.0) || cfg.order == 0 || cfg.angles == 0 {
        bail!("need 0 < r-cover < 1, order >= 1 and angles >= 1");
    }
    let mut sink: Box<dyn Write> = match &a.common.out {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    writeln!(sink, "{}", json!({ "config": config }))?;
    let mut io_err = None;
    let summary = conjecture_scan(&cfg, |r| {
        if io_err.is_none() {
            if let Err(e) = serde_json::to_writer(&mut sink, r).map_err(io::Error::from).and_then(|_| writeln!(sink)) {
                io_err = Some(e);
            }
        }
    });
    if let Some(e) = io_err {
        return Err(e.into());
    }
    writeln!(sink, "{}", json!({ "summary": summary }))?;
    sink.flush()?;
    drop(sink);
    let pass = summary.proven_bounds_hold();
    if a.common.out.is_some() {
        let worst = |e: &Option<logharm::analysis::conjecture::Extreme>| e.as_ref().map_or(f64::NAN, |e| e.value);
        print!(
            "{}trials {} completed, {} failed\nworst n|a_n-b_n|/2 {:.12}\nmin covering proxy {:.12} (1/16 = 0.0625, 1/e^2 = {:.6})\nbelow 1/e^2: {}\nresult: {}\n",
            header(config),
            summary.completed,
            summary.failed,
            worst(&summary.worst_diff_ratio),
            worst(&summary.min_covering),
            (-2.0f64).exp(),
            summary.below_conjectured_covering,
            verdict(pass)
        );
    }
    Ok(pass)
}
