use crate::formula::{evaluate, Assignment, Formula};
use crate::structures::Structure;
use crate::value::Value;

use super::IctError;

/// Maximal runs of consecutive indices on which the fingerprint
/// (δ(c; ā_i))_{δ ∈ Δ} is constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakpointProfile {
    pub fingerprints: Vec<Vec<bool>>,
    /// Inclusive index ranges.
    pub blocks: Vec<(usize, usize)>,
}

impl BreakpointProfile {
    pub fn breakpoints(&self) -> usize {
        self.blocks.len().saturating_sub(1)
    }
}

pub fn breakpoint_profile(
    s: &dyn Structure,
    deltas: &[Formula],
    element_var: &str,
    c: &Value,
    tuple_vars: &[String],
    sequence: &[Vec<Value>],
) -> Result<BreakpointProfile, IctError> {
    let mut fingerprints = Vec::with_capacity(sequence.len());
    for a in sequence {
        if a.len() != tuple_vars.len() {
            return Err(IctError::Malformed(format!("tuple of length {} where {} expected", a.len(), tuple_vars.len())));
        }
        let mut env: Assignment = tuple_vars.iter().cloned().zip(a.iter().cloned()).collect();
        env.insert(element_var.to_string(), c.clone());
        let fp = deltas.iter().map(|d| evaluate(s, d, &env)).collect::<Result<Vec<_>, _>>()?;
        fingerprints.push(fp);
    }
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for i in 0..fingerprints.len() {
        match blocks.last_mut() {
            Some(last) if fingerprints[last.1] == fingerprints[i] => last.1 = i,
            _ => blocks.push((i, i)),
        }
    }
    Ok(BreakpointProfile { fingerprints, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::rational::{int, rat};
    use crate::structures::PairDlo;

    #[test]
    fn diagonal_sequence() {
        let s = PairDlo::new();
        let deltas = vec![
            parse("y.1 < x.1", s.signature()).unwrap(),
            parse("y.2 < x.2", s.signature()).unwrap(),
        ];
        let seq: Vec<Vec<Value>> = (0..6).map(|i| vec![Value::Pair(int(i), int(i))]).collect();
        let c = Value::Pair(rat(1, 2), rat(5, 2));
        let prof = breakpoint_profile(&s, &deltas, "x", &c, &["y".to_string()], &seq).unwrap();
        assert_eq!(prof.blocks, vec![(0, 0), (1, 2), (3, 5)]);
        assert_eq!(prof.breakpoints(), 2);
    }
}
