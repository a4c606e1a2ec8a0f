//! CSV renderers. All files use `.` decimals and `\n` line endings.

use std::io::{self, Write};

use salp_route_core::planner::{Route, SimTrace};

use crate::bench::BenchRecord;

pub const BENCH_HEADER: &str =
    "algorithm,population,iterations,best_cost,time_seconds,seed,scenario_id";
pub const ROUTE_HEADER: &str = "x,y,z";
pub const TRACE_HEADER: &str = "t,x,y,z,event";

/// Nine significant digits in the style of C's `%.9g`.
pub fn fmt_sig9(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn write_route_csv<W: Write>(mut w: W, route: &Route) -> io::Result<()> {
    writeln!(w, "{ROUTE_HEADER}")?;
    for p in &route.points {
        writeln!(w, "{},{},{}", fmt_sig9(p.x), fmt_sig9(p.y), fmt_sig9(p.z))?;
    }
    Ok(())
}

pub fn write_trace_csv<W: Write>(mut w: W, trace: &SimTrace) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for s in &trace.samples {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_sig9(s.t),
            fmt_sig9(s.position.x),
            fmt_sig9(s.position.y),
            fmt_sig9(s.position.z),
            s.event.label()
        )?;
    }
    Ok(())
}

/// Failed trials render `NaN` in `best_cost`.
pub fn write_bench_csv<W: Write>(mut w: W, records: &[BenchRecord]) -> io::Result<()> {
    writeln!(w, "{BENCH_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.algorithm,
            r.population,
            r.iterations,
            fmt_sig9(r.best_cost),
            fmt_sig9(r.time_seconds),
            r.seed,
            r.scenario_id
        )?;
    }
    Ok(())
}
