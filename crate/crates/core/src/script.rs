//! Edit scripts: ordered insert/delete/substitute operations.
//!
//! Positions are 1-based and interpreted against the string as it exists
//! when the op is applied, ops running left to right through the list.
//! Every script producer in this crate emits ops in non-increasing
//! position order, which keeps earlier (not yet edited) positions stable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{Symbol, Text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EditOp {
    /// Remove the symbol at `pos`.
    Delete { pos: usize },
    /// Insert `symbol` so it ends up at `pos` (may equal len+1 to append).
    Insert { pos: usize, symbol: Symbol },
    /// Replace the symbol at `pos` with `symbol`.
    Substitute { pos: usize, symbol: Symbol },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
}

impl EditScript {
    pub fn new(ops: Vec<EditOp>) -> Self {
        Self { ops }
    }

    pub fn empty() -> Self {
        Self { ops: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The delete-everything-insert-everything fallback, length |u| + |v|.
    pub fn trivial(u: &Text, v: &Text) -> Self {
        let mut ops = Vec::with_capacity(u.len() + v.len());
        for pos in (1..=u.len()).rev() {
            ops.push(EditOp::Delete { pos });
        }
        for pos in (1..=v.len()).rev() {
            ops.push(EditOp::Insert {
                pos: 1,
                symbol: v.sym(pos),
            });
        }
        Self { ops }
    }
}

/// Apply `script` to `u`, validating every position.
pub fn apply_script(u: &Text, script: &EditScript) -> Result<Text> {
    let mut work: Vec<Symbol> = u.symbols().to_vec();
    for (index, &op) in script.ops.iter().enumerate() {
        let len = work.len();
        let oob = |op| Error::ScriptOpOutOfRange { index, op, len };
        match op {
            EditOp::Delete { pos } => {
                if pos == 0 || pos > len {
                    return Err(oob(op));
                }
                work.remove(pos - 1);
            }
            EditOp::Insert { pos, symbol } => {
                if pos == 0 || pos > len + 1 {
                    return Err(oob(op));
                }
                work.insert(pos - 1, symbol);
            }
            EditOp::Substitute { pos, symbol } => {
                if pos == 0 || pos > len {
                    return Err(oob(op));
                }
                work[pos - 1] = symbol;
            }
        }
    }
    Ok(Text::from_slice(&work, u.alphabet()))
}

/// Merge runs of deletions immediately followed by insertions at the same
/// spot into substitutions. Never lengthens a script; the transformed
/// script applies to the same target.
///
/// Indel-only scripts out of alignment recovery have the shape
/// `Delete(p+k-1) .. Delete(p), Insert(p, s1) .. Insert(p, sm)` per gap;
/// the overlap of each such pair of runs becomes substitutions.
pub fn merge_adjacent_indels(script: &EditScript) -> EditScript {
    let ops = &script.ops;
    let mut out = Vec::with_capacity(ops.len());
    let mut i = 0;
    while i < ops.len() {
        // Collect a maximal contiguous descending delete run.
        let mut del_end = i;
        while let Some(&EditOp::Delete { pos }) = ops.get(del_end) {
            if del_end > i {
                let EditOp::Delete { pos: prev } = ops[del_end - 1] else {
                    unreachable!()
                };
                if pos + 1 != prev {
                    break;
                }
            }
            del_end += 1;
        }
        if del_end == i {
            out.push(ops[i]);
            i += 1;
            continue;
        }
        let EditOp::Delete { pos: lowest } = ops[del_end - 1] else {
            unreachable!()
        };
        // Collect following insertions anchored at the run's low position.
        let mut symbols = Vec::new();
        let mut j = del_end;
        while j < ops.len() {
            match ops[j] {
                EditOp::Insert { pos, symbol } if pos == lowest => {
                    symbols.push(symbol);
                    j += 1;
                }
                _ => break,
            }
        }
        let dels = del_end - i;
        let inss = symbols.len();
        let subs = dels.min(inss);
        if subs == 0 {
            out.extend_from_slice(&ops[i..del_end]);
            i = del_end;
            continue;
        }
        // Inserts were emitted in reverse target order; the final segment
        // content is symbols reversed. Replace the overlap in place.
        symbols.reverse();
        if dels > inss {
            for pos in (lowest + subs..lowest + dels).rev() {
                out.push(EditOp::Delete { pos });
            }
        }
        for (k, &symbol) in symbols[..subs].iter().enumerate().rev() {
            out.push(EditOp::Substitute {
                pos: lowest + k,
                symbol,
            });
        }
        if inss > dels {
            for &symbol in symbols[subs..].iter().rev() {
                out.push(EditOp::Insert {
                    pos: lowest + subs,
                    symbol,
                });
            }
        }
        i = j;
    }
    EditScript::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(codes: &[Symbol]) -> Text {
        Text::from_codes(codes.to_vec(), 26).unwrap()
    }

    #[test]
    fn substitute_first() {
        // ("abc", [Substitute(1,'x')]) -> "xbc"
        let u = t(&[0, 1, 2]);
        let s = EditScript::new(vec![EditOp::Substitute { pos: 1, symbol: 23 }]);
        assert_eq!(apply_script(&u, &s).unwrap(), t(&[23, 1, 2]));
    }

    #[test]
    fn empty_script_is_identity() {
        let u = t(&[0, 1, 2]);
        assert_eq!(apply_script(&u, &EditScript::empty()).unwrap(), u);
    }

    #[test]
    fn out_of_range_reports_op() {
        let u = t(&[0, 1]);
        let s = EditScript::new(vec![EditOp::Delete { pos: 3 }]);
        match apply_script(&u, &s) {
            Err(Error::ScriptOpOutOfRange { index: 0, len: 2, .. }) => {}
            other => panic!("expected out-of-range error, got {other:?}"),
        }
    }

    #[test]
    fn trivial_script_rewrites_anything() {
        let u = t(&[0, 1, 2, 3]);
        let v = t(&[9, 8]);
        let s = EditScript::trivial(&u, &v);
        assert_eq!(s.len(), 6);
        assert_eq!(apply_script(&u, &s).unwrap(), v);
    }

    #[test]
    fn merge_turns_indel_pairs_into_subs() {
        // delete 3,2 then insert at 2: one sub + one delete-equivalent.
        let u = t(&[0, 1, 2, 3]);
        let s = EditScript::new(vec![
            EditOp::Delete { pos: 3 },
            EditOp::Delete { pos: 2 },
            EditOp::Insert { pos: 2, symbol: 9 },
        ]);
        let merged = merge_adjacent_indels(&s);
        assert!(merged.len() <= s.len());
        assert_eq!(
            apply_script(&u, &merged).unwrap(),
            apply_script(&u, &s).unwrap()
        );
    }
}
