use std::fmt::Write as _;

use super::{BlockSparse, SdpError, SdpProblem, Sense};

/// Writes SDPA sparse format. SDPA's dual form `max <F0, Y>` subject to
/// `<F_i, Y> = c_i` carries the problem with `F0 = -C` (minimization) or
/// `F0 = C` (maximization), `F_i = A_i` and `c = b`. Indices are 1-based and
/// only the upper triangle is written.
pub fn write_sdpa(problem: &SdpProblem) -> Result<String, SdpError> {
    problem.validate()?;
    if !problem.dual_equalities.is_empty() {
        return Err(SdpError::InvalidProblem(
            "SDPA format has no dual equalities".into(),
        ));
    }
    let f0 = match problem.sense {
        Sense::Minimize => problem.objective.scaled(-1.0),
        Sense::Maximize => problem.objective.clone(),
    }
    .canonical();
    let mut out = String::new();
    let _ = writeln!(out, "{}", problem.constraints.len());
    let _ = writeln!(out, "{}", problem.block_dims.len());
    let dims: Vec<String> = problem.block_dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "{}", dims.join(" "));
    let b: Vec<String> = problem.constraints.iter().map(|c| fmt(c.rhs)).collect();
    let _ = writeln!(out, "{}", b.join(" "));
    let mut emit = |k: usize, m: &BlockSparse| {
        for e in m.entries() {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                k,
                e.block + 1,
                e.row + 1,
                e.col + 1,
                fmt(e.value)
            );
        }
    };
    emit(0, &f0);
    for (i, c) in problem.constraints.iter().enumerate() {
        emit(i + 1, &c.matrix.clone().canonical());
    }
    Ok(out)
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// Reads the subset of SDPA sparse format produced by [`write_sdpa`]; the
/// result is a minimization problem.
pub fn read_sdpa(text: &str) -> Result<SdpProblem, SdpError> {
    let bad = |msg: &str| SdpError::Io(format!("sdpa: {msg}"));
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('*') && !l.starts_with('"'));
    let tokens = |l: &str| -> Vec<String> {
        l.split(|c: char| {
            c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')'
        })
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
    };
    let first = |l: Option<&str>| -> Result<usize, SdpError> {
        let l = l.ok_or_else(|| bad("truncated header"))?;
        tokens(l)
            .first()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("expected integer"))
    };
    let m = first(lines.next())?;
    let nblocks = first(lines.next())?;
    let dims: Vec<i64> = tokens(lines.next().ok_or_else(|| bad("missing block structure"))?)
        .iter()
        .take(nblocks)
        .map(|t| t.parse().map_err(|_| bad("bad block size")))
        .collect::<Result<_, _>>()?;
    if dims.len() != nblocks || dims.iter().any(|&d| d <= 0) {
        return Err(bad("only positive (dense) block sizes are supported"));
    }
    let mut b = Vec::new();
    while b.len() < m {
        let l = lines.next().ok_or_else(|| bad("missing rhs"))?;
        for t in tokens(l) {
            b.push(t.parse::<f64>().map_err(|_| bad("bad rhs value"))?);
        }
    }
    let mut mats = vec![BlockSparse::new(); m + 1];
    for l in lines {
        let t = tokens(l);
        if t.len() < 5 {
            return Err(bad("short entry line"));
        }
        let k: usize = t[0].parse().map_err(|_| bad("bad matrix index"))?;
        let blk: usize = t[1].parse().map_err(|_| bad("bad block index"))?;
        let i: usize = t[2].parse().map_err(|_| bad("bad row"))?;
        let j: usize = t[3].parse().map_err(|_| bad("bad col"))?;
        let v: f64 = t[4].parse().map_err(|_| bad("bad value"))?;
        if k > m || blk == 0 || blk > nblocks || i == 0 || j == 0 {
            return Err(bad("entry index out of range"));
        }
        mats[k].push(blk - 1, i - 1, j - 1, v);
    }
    let mut mats = mats.into_iter();
    let c = mats.next().unwrap().scaled(-1.0).canonical();
    let mut p = SdpProblem::new(dims.iter().map(|&d| d as usize).collect(), Sense::Minimize)
        .with_objective(c);
    for (a, rhs) in mats.zip(b) {
        p.add_constraint(a.canonical(), rhs);
    }
    p.validate()?;
    Ok(p)
}
