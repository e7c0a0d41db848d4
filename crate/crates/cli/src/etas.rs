//! `start:stop:count` budget grids.

/// Inclusive linspace from `start` to `stop` with `count` samples. Zero is
/// prepended when `start > 0` so every curve is anchored at `η = 0`.
pub fn parse_etas(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(format!("budget grid `{text}` is not of the form start:stop:count"));
    };
    let start: f64 = start
        .trim()
        .parse()
        .map_err(|_| format!("budget grid start `{start}` is not a number"))?;
    let stop: f64 = stop
        .trim()
        .parse()
        .map_err(|_| format!("budget grid stop `{stop}` is not a number"))?;
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| format!("budget grid count `{count}` is not a positive integer"))?;
    if !start.is_finite() || !stop.is_finite() || start < 0.0 || stop < start {
        return Err(format!("budget grid needs 0 <= start <= stop, got {start}:{stop}"));
    }
    if count == 0 {
        return Err("budget grid count must be positive".into());
    }
    let mut etas = Vec::with_capacity(count + 1);
    if start > 0.0 {
        etas.push(0.0);
    }
    if count == 1 {
        etas.push(start);
    } else {
        let step = (stop - start) / (count - 1) as f64;
        etas.extend((0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }));
    }
    Ok(etas)
}
