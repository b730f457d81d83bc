//! Builtin state specs: `ghz:N`, `w:N`, `gabcd:a,b,c,d`.

use genent::{g_abcd, ghz, w_state, GAbcdParams, PureState};
use num_complex::Complex64;

use crate::Failure;

/// Parses `re`, `re+imi`, `re-imi`, `imi` or `i`.
pub fn parse_complex(text: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::Input(format!("bad complex literal '{text}'"));
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn parse_builtin(spec: &str) -> Result<PureState, Failure> {
    let (name, arg) = spec
        .split_once(':')
        .ok_or_else(|| Failure::Input(format!("builtin '{spec}' is not of the form name:args")))?;
    let arity = || {
        arg.parse::<usize>()
            .map_err(|_| Failure::Input(format!("bad qubit count '{arg}' in builtin '{spec}'")))
    };
    match name {
        "ghz" => Ok(ghz(arity()?)?),
        "w" => Ok(w_state(arity()?)?),
        "gabcd" => {
            let values = arg.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
            let [a, b, c, d] = values[..] else {
                return Err(Failure::Input(format!("gabcd takes four parameters, got {}", values.len())));
            };
            Ok(g_abcd(&GAbcdParams::new(a, b, c, d)?)?)
        }
        other => Err(Failure::Input(format!("unknown builtin '{other}' (expected ghz, w or gabcd)"))),
    }
}
