//! Text file formats for Hamiltonians.
//!
//! Two formats are supported, distinguished by their header line:
//!
//! **Pauli sums** — header `nqubits <N>`, then one term per line as
//! `<coefficient> <letters>` where `<letters>` is exactly `N` characters
//! from `{I, X, Y, Z}` and character `i` addresses qubit `i` (leftmost is
//! qubit 0). Duplicate strings are merged.
//!
//! **Fermionic operators** — header `norbitals <N>` (spin-orbital count),
//! then lines `1b <i> <j> <v>` for `v·c†_i c_j` and `2b <i> <j> <k> <l> <v>`
//! for `(v/2)·c†_i c†_j c_k c_l`. Loading applies the Jordan–Wigner mapping,
//! so both formats produce a qubit [`Hamiltonian`].
//!
//! Everything from `#` to the end of a line is a comment; blank lines are
//! ignored.

use std::path::Path;

use crate::error::{CoreError, Result};
use crate::fermion::{jordan_wigner, FermionicOperators};
use crate::pauli::{Hamiltonian, HamiltonianBuilder, PauliString};
use crate::scalar::Scalar;

fn parse_err(line: usize, msg: impl Into<String>) -> CoreError {
    CoreError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Content lines with comments stripped, paired with 1-based line numbers.
fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines().enumerate().filter_map(|(idx, raw)| {
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            None
        } else {
            Some((idx + 1, stripped))
        }
    })
}

fn parse_header(line: usize, text: &str, keyword: &str) -> Result<usize> {
    let mut parts = text.split_whitespace();
    let key = parts.next().unwrap_or_default();
    if key != keyword {
        return Err(parse_err(
            line,
            format!("expected header '{keyword} <N>', found '{text}'"),
        ));
    }
    let n: usize = parts
        .next()
        .ok_or_else(|| parse_err(line, format!("'{keyword}' header is missing the count")))?
        .parse()
        .map_err(|_| parse_err(line, format!("invalid count in '{keyword}' header")))?;
    if parts.next().is_some() {
        return Err(parse_err(line, "trailing tokens after header"));
    }
    Ok(n)
}

fn parse_float<T: Scalar>(line: usize, token: &str, what: &str) -> Result<T> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what} '{token}' is not finite")));
    }
    Ok(T::of_f64(v))
}

fn parse_index(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid orbital index '{token}'")))
}

/// Parse a Pauli-sum Hamiltonian from text.
pub fn parse_pauli_text<T: Scalar>(src: &str) -> Result<Hamiltonian<T>> {
    let mut lines = content_lines(src);
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file: expected 'nqubits <N>' header"))?;
    let n_qubits = parse_header(hline, htext, "nqubits")?;
    let mut builder = HamiltonianBuilder::<T>::new(n_qubits)
        .map_err(|e| parse_err(hline, e.to_string()))?;

    for (lineno, text) in lines {
        let mut parts = text.split_whitespace();
        let coeff_tok = parts.next().expect("content lines are non-empty");
        let letters = parts
            .next()
            .ok_or_else(|| parse_err(lineno, "expected '<coefficient> <letters>'"))?;
        if parts.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens after Pauli term"));
        }
        let coeff: T = parse_float(lineno, coeff_tok, "coefficient")?;
        if letters.len() != n_qubits {
            return Err(parse_err(
                lineno,
                format!(
                    "Pauli string has {} letters, expected {n_qubits}",
                    letters.len()
                ),
            ));
        }
        let string =
            PauliString::from_letters(letters).map_err(|e| parse_err(lineno, e.to_string()))?;
        builder.add(coeff, string);
    }
    builder.finish()
}

/// Render a Hamiltonian in the Pauli text format. Coefficients are written
/// with shortest-round-trip formatting, so `parse_pauli_text` recovers the
/// operator exactly for `f64` coefficients.
pub fn write_pauli_text<T: Scalar>(h: &Hamiltonian<T>) -> String {
    let mut out = String::new();
    out.push_str(&format!("nqubits {}\n", h.n_qubits()));
    for &(coeff, string) in h.terms() {
        out.push_str(&format!(
            "{} {}\n",
            coeff.to_f64(),
            string.letters(h.n_qubits())
        ));
    }
    out
}

/// Parse a fermionic operator set from text (no mapping applied).
pub fn parse_fermion_text<T: Scalar>(src: &str) -> Result<FermionicOperators<T>> {
    let mut lines = content_lines(src);
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file: expected 'norbitals <N>' header"))?;
    let n_orbitals = parse_header(hline, htext, "norbitals")?;
    let mut ops = FermionicOperators::<T>::new(n_orbitals)
        .map_err(|e| parse_err(hline, e.to_string()))?;

    for (lineno, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match tokens[0] {
            "1b" => {
                if tokens.len() != 4 {
                    return Err(parse_err(lineno, "expected '1b <i> <j> <v>'"));
                }
                let i = parse_index(lineno, tokens[1])?;
                let j = parse_index(lineno, tokens[2])?;
                let v: T = parse_float(lineno, tokens[3], "coefficient")?;
                ops.add_one_body(i, j, v)
                    .map_err(|e| parse_err(lineno, e.to_string()))?;
            }
            "2b" => {
                if tokens.len() != 6 {
                    return Err(parse_err(lineno, "expected '2b <i> <j> <k> <l> <v>'"));
                }
                let i = parse_index(lineno, tokens[1])?;
                let j = parse_index(lineno, tokens[2])?;
                let k = parse_index(lineno, tokens[3])?;
                let l = parse_index(lineno, tokens[4])?;
                let v: T = parse_float(lineno, tokens[5], "coefficient")?;
                ops.add_two_body(i, j, k, l, v)
                    .map_err(|e| parse_err(lineno, e.to_string()))?;
            }
            other => {
                return Err(parse_err(
                    lineno,
                    format!("unknown term kind '{other}' (expected '1b' or '2b')"),
                ));
            }
        }
    }
    Ok(ops)
}

/// Which of the two text formats a file uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianFormat {
    PauliSum,
    Fermionic,
}

/// Identify the format from the header line.
pub fn sniff_format(src: &str) -> Result<HamiltonianFormat> {
    let (line, text) = content_lines(src)
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    match text.split_whitespace().next() {
        Some("nqubits") => Ok(HamiltonianFormat::PauliSum),
        Some("norbitals") => Ok(HamiltonianFormat::Fermionic),
        _ => Err(parse_err(
            line,
            "unrecognized header: expected 'nqubits <N>' or 'norbitals <N>'",
        )),
    }
}

/// Parse either format into a qubit Hamiltonian, applying the Jordan–Wigner
/// mapping to fermionic input.
pub fn load_hamiltonian_str<T: Scalar>(src: &str) -> Result<Hamiltonian<T>> {
    match sniff_format(src)? {
        HamiltonianFormat::PauliSum => parse_pauli_text(src),
        HamiltonianFormat::Fermionic => jordan_wigner(&parse_fermion_text::<T>(src)?),
    }
}

/// [`load_hamiltonian_str`] for a file on disk.
pub fn load_hamiltonian_file<T: Scalar>(path: impl AsRef<Path>) -> Result<Hamiltonian<T>> {
    let src = std::fs::read_to_string(path)?;
    load_hamiltonian_str(&src)
}
