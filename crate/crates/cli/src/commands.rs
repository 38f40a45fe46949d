use std::io::Write;
use std::path::Path;

use farey_subsets::density::default_cutoff;
use farey_subsets::geom::{format_rational, format_rational_short, region_tuple};
use farey_subsets::lattice::{
    brute_count_congruent, brute_count_p, lemma1_main_terms, moebius_count_congruent, moebius_count_p,
};
use farey_subsets::{
    compare as compare_rows, empirical_density, enumerate_farey, enumerate_members, finite_identity_check,
    theoretical_density, tuple_counts, CongruenceClass, DeltaTuple, LatticeRegion, Rational,
};
use serde::Serialize;
use serde_json::json;

use crate::{svg, CliError, CliResult, Format, TextFormat};

fn delta_tuple(h: usize, delta: Vec<u64>) -> CliResult<DeltaTuple> {
    if h == 0 {
        return Err(CliError::Invalid("H must be at least 1".into()));
    }
    if delta.len() != h {
        return Err(CliError::Invalid(format!("--delta has {} entries, expected H = {h}", delta.len())));
    }
    Ok(DeltaTuple::new(delta)?)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn enumerate(out: &mut dyn Write, q: u64, p: Option<u64>, format: Format) -> CliResult<()> {
    let stream = enumerate_farey(q, p)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["a", "q"])?;
            for f in stream {
                w.write_record([f.numerator().to_string(), f.denominator().to_string()])?;
            }
            w.flush()?;
        }
        Format::Json => {
            write!(out, "[")?;
            for (i, f) in stream.enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                write!(out, "{{\"a\":{},\"q\":{}}}", f.numerator(), f.denominator())?;
            }
            writeln!(out, "]")?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StatsRow {
    delta: DeltaTuple,
    count: u64,
    frequency: String,
}

pub fn stats(out: &mut dyn Write, q: u64, p: u64, h: usize, top: Option<usize>, format: Format) -> CliResult<()> {
    if h == 0 {
        return Err(CliError::Invalid("H must be at least 1".into()));
    }
    let hist = tuple_counts(q, p, h)?;
    let windows = hist.population.saturating_sub(h as u64);
    if hist.total() != windows {
        return Err(CliError::Internal(format!("histogram total {} but {windows} windows", hist.total())));
    }
    let mut rows = hist.sorted();
    if let Some(m) = top {
        rows.truncate(m);
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header: Vec<String> = (1..=h).map(|i| format!("delta_{i}")).collect();
            header.extend(["count", "frequency_num", "frequency_den", "frequency"].map(String::from));
            w.write_record(&header)?;
            for (delta, count) in &rows {
                let freq = empirical_density(&hist, delta)?;
                let mut rec: Vec<String> = delta.entries().iter().map(u64::to_string).collect();
                rec.push(count.to_string());
                rec.push(freq.numer().to_string());
                rec.push(freq.denom().to_string());
                rec.push(format!("{:.12e}", to_f64(&freq)));
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<StatsRow> = rows
                .into_iter()
                .map(|(delta, count)| {
                    let freq = empirical_density(&hist, &delta)?;
                    Ok(StatsRow { delta, count, frequency: format_rational_short(&freq) })
                })
                .collect::<CliResult<_>>()?;
            write_json(
                out,
                &json!({
                    "order": q,
                    "prime": p,
                    "h": h,
                    "population": hist.population,
                    "windows": windows,
                    "rows": rows,
                }),
            )?;
        }
    }
    Ok(())
}

fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn density(out: &mut dyn Write, p: u64, h: usize, delta: Vec<u64>, n_cut: Option<u64>) -> CliResult<()> {
    let delta = delta_tuple(h, delta)?;
    let est = theoretical_density(p, h, &delta, n_cut.unwrap_or_else(|| default_cutoff(h)))?;
    write_json(out, &est)
}

pub fn families(out: &mut dyn Write, p: u64, h: usize, delta: Vec<u64>) -> CliResult<()> {
    let delta = delta_tuple(h, delta)?;
    let fams = enumerate_members(p, h, &delta)?;
    let list: Vec<_> = fams
        .iter()
        .map(|f| {
            let alpha = f.pattern.alpha();
            json!({
                "length": alpha.len(),
                "alpha": alpha,
                "class": { "a": alpha[0], "b": alpha[1] },
                "template": f.template,
            })
        })
        .collect();
    write_json(out, &json!({ "prime": p, "h": h, "delta": delta, "families": list }))
}

pub fn region(out: &mut dyn Write, tuple: &[u64], vertices: bool) -> CliResult<()> {
    if tuple.contains(&0) {
        return Err(CliError::Invalid("indices must be at least 1".into()));
    }
    let poly = region_tuple(tuple);
    if poly.is_empty() {
        writeln!(out, "empty, area 0/1")?;
        return Ok(());
    }
    writeln!(out, "area {}", format_rational(&poly.area()))?;
    if vertices {
        for v in poly.vertices() {
            writeln!(out, "{} {}", format_rational(&v.x), format_rational(&v.y))?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn compare(
    out: &mut dyn Write,
    q: u64,
    p: u64,
    h: usize,
    delta_max: u64,
    n_cut: Option<u64>,
    svg_path: Option<&Path>,
    format: Format,
) -> CliResult<()> {
    if h == 0 {
        return Err(CliError::Invalid("H must be at least 1".into()));
    }
    if delta_max == 0 {
        return Err(CliError::Invalid("--delta-max must be at least 1".into()));
    }
    let deltas = DeltaTuple::all_up_to(h, delta_max);
    let rows = compare_rows(q, p, h, &deltas, n_cut.unwrap_or_else(|| default_cutoff(h)))?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let mut header: Vec<String> = (1..=h).map(|i| format!("delta_{i}")).collect();
            header.extend(
                [
                    "count",
                    "empirical_num",
                    "empirical_den",
                    "main_num",
                    "main_den",
                    "tail_bound_num",
                    "tail_bound_den",
                    "empirical",
                    "main",
                    "difference",
                    "scale",
                ]
                .map(String::from),
            );
            w.write_record(&header)?;
            for r in &rows {
                let mut rec: Vec<String> = r.delta.entries().iter().map(u64::to_string).collect();
                rec.push(r.count.to_string());
                for x in [&r.empirical, &r.main, &r.tail_bound] {
                    rec.push(x.numer().to_string());
                    rec.push(x.denom().to_string());
                }
                rec.push(format!("{:.12e}", to_f64(&r.empirical)));
                rec.push(format!("{:.12e}", to_f64(&r.main)));
                rec.push(format!("{:.6e}", r.difference));
                rec.push(format!("{:.6e}", r.scale));
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(out, &rows)?,
    }
    if let Some(path) = svg_path {
        svg::emit_svg(&rows, path)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Lemma1Row {
    count: String,
    brute: u64,
    moebius: u64,
    main: f64,
    abs_error: f64,
    rel_error: f64,
}

fn lemma1_region(q: u64, spec: &[String]) -> CliResult<(LatticeRegion, Rational)> {
    let side = Rational::from_integer(q.into());
    let sq = &side * &side;
    match spec.first().map(String::as_str) {
        Some("triangle") if spec.len() == 1 => {
            Ok((LatticeRegion::scaled_triangle(q)?, sq / Rational::from_integer(2.into())))
        }
        Some("square") if spec.len() == 1 => Ok((LatticeRegion::square(q)?, sq)),
        Some("tuple") if spec.len() == 2 => {
            let ns: Vec<u64> = spec[1]
                .split(',')
                .map(|s| s.trim().parse::<u64>().ok().filter(|&n| n >= 1))
                .collect::<Option<_>>()
                .ok_or_else(|| CliError::Invalid(format!("malformed index tuple '{}'", spec[1])))?;
            let area = region_tuple(&ns).area() * sq;
            Ok((LatticeRegion::cell(q, &ns)?, area))
        }
        _ => Err(CliError::Invalid("--region must be 'triangle', 'square' or 'tuple n1,...'".into())),
    }
}

pub fn lemma1(out: &mut dyn Write, q: u64, p: u64, region: &[String], format: TextFormat) -> CliResult<()> {
    if q == 0 {
        return Err(CliError::Invalid("Q must be at least 1".into()));
    }
    let classes = CongruenceClass::all(p)?;
    let (reg, area) = lemma1_region(q, region)?;
    let (main_p, main_ab) = lemma1_main_terms(&area, p);
    let row = |label: String, brute: u64, moebius: u64, main: f64| -> CliResult<Lemma1Row> {
        if brute != moebius {
            return Err(CliError::Internal(format!("{label}: brute force {brute} but Möbius sum {moebius}")));
        }
        let abs_error = brute as f64 - main;
        let rel_error = if main > 0.0 { abs_error.abs() / main } else { f64::NAN };
        Ok(Lemma1Row { count: label, brute, moebius, main, abs_error, rel_error })
    };
    let mut rows = vec![row("N_p".into(), brute_count_p(&reg, p), moebius_count_p(&reg, p), main_p)?];
    for cls in classes {
        let label = format!("N({},{})", cls.a, cls.b);
        rows.push(row(label, brute_count_congruent(&reg, cls), moebius_count_congruent(&reg, cls), main_ab)?);
    }
    match format {
        TextFormat::Text => {
            writeln!(out, "{:<10} {:>12} {:>12} {:>16} {:>14} {:>10}", "count", "brute", "moebius", "main", "abs_err", "rel_err")?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<10} {:>12} {:>12} {:>16.3} {:>14.3} {:>10.6}",
                    r.count, r.brute, r.moebius, r.main, r.abs_error, r.rel_error
                )?;
            }
        }
        TextFormat::Json => write_json(
            out,
            &json!({ "order": q, "prime": p, "area": format_rational_short(&area), "rows": rows }),
        )?,
    }
    Ok(())
}

pub fn identity3(out: &mut dyn Write, q: u64, p: u64, h: usize, delta: Vec<u64>) -> CliResult<()> {
    let delta = delta_tuple(h, delta)?;
    let report = finite_identity_check(q, p, h, &delta)?;
    if report.rhs != report.lhs_cyclic {
        eprintln!(
            "farey-subsets: warning: lattice sum {} differs from cyclic window count {}",
            report.rhs, report.lhs_cyclic
        );
    }
    let mut value = serde_json::to_value(&report)?;
    value["difference"] = json!(report.difference());
    write_json(out, &value)
}
