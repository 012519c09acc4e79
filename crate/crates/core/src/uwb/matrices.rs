//! Channel, ISI-partition and front-end matrices of the matrix-form model.

use num_complex::Complex64;

use super::config::Dims;
use crate::error::{Error, Result};
use crate::linalg::{CMat, ZERO};

/// Toeplitz convolution matrix with first column `h` zero-padded to
/// `cols + h.len() - 1` rows.
pub fn build_toeplitz_channel(h: &[Complex64], cols: usize) -> Result<CMat> {
    if cols < 1 {
        return Err(Error::config("Toeplitz channel needs at least one column"));
    }
    if h.is_empty() {
        return Err(Error::config("empty channel tap vector"));
    }
    let rows = cols + h.len() - 1;
    Ok(CMat::from_fn(rows, cols, |i, j| {
        i.checked_sub(j).and_then(|k| h.get(k).copied()).unwrap_or(ZERO)
    }))
}

/// ISI channel matrices `(H^(-g), H^(+g))`, each `m_h x ns`.
///
/// The upper partition is cut from the triangular matrix `H_up` holding
/// the channel tail `h(L-1), h(L-2), ...` and occupies the upper-right
/// corner; the lower partition is cut from the lower-triangular head
/// `h(0), h(1), ...` and occupies the lower-left corner. The triangles have
/// `L - (g-1) ns - 1` rows; when that exceeds `ns` only the last (resp.
/// first) `ns` columns are kept, otherwise the whole triangle is used.
/// A non-positive row count means no overlap at lag `g` and yields zeros.
pub fn build_isi_partitions(h: &[Complex64], ns: usize, g: usize) -> Result<(CMat, CMat)> {
    if g < 1 {
        return Err(Error::config("ISI lag must be at least 1"));
    }
    if h.is_empty() || ns == 0 {
        return Err(Error::config("empty channel or symbol grid"));
    }
    let l = h.len();
    let m_h = ns + l - 1;
    let mut minus = CMat::zeros(m_h, ns);
    let mut plus = CMat::zeros(m_h, ns);
    let rowdim = l as i64 - ((g - 1) * ns) as i64 - 1;
    if rowdim <= 0 {
        return Ok((minus, plus));
    }
    let r = rowdim as usize;

    let h_up = CMat::from_fn(r, r, |a, b| if b >= a { h[l - 1 + a - b] } else { ZERO });
    let h_low = CMat::from_fn(r, r, |a, b| if a >= b { h[a - b] } else { ZERO });

    let width = r.min(ns);
    let upper = h_up.columns(r - width, width);
    let lower = h_low.columns(0, width);
    // [0 H^(u,g); 0 0] and [0 0; H^(l,g) 0]
    minus.view_mut((0, ns - width), (r, width)).copy_from(&upper);
    plus.view_mut((m_h - r, 0), (r, width)).copy_from(&lower);
    Ok((minus, plus))
}

/// Pulse-shaping matrix `P_t` (`ns x N_c`): chip `j` drives the `nu`
/// channel-grid samples of its chip interval with the chip pulse.
pub fn pulse_shaping_matrix(dims: &Dims, pulse: &[f64]) -> Result<CMat> {
    Error::check_len("chip pulse", dims.nu, pulse.len())?;
    let mut pt = CMat::zeros(dims.ns, dims.n_c);
    for j in 0..dims.n_c {
        for (a, p) in pulse.iter().enumerate() {
            pt[(j * dims.nu + a, j)] = Complex64::new(*p, 0.0);
        }
    }
    Ok(pt)
}

/// Chip-matched filter and chip-rate sampler `P_r` (`M x m_h`): sample `m`
/// correlates the channel-grid samples of chip interval `m` with the
/// conjugated time-reversed pulse.
pub fn matched_filter_matrix(dims: &Dims, pulse: &[f64]) -> Result<CMat> {
    Error::check_len("chip pulse", dims.nu, pulse.len())?;
    let mut pr = CMat::zeros(dims.m, dims.m_h);
    for m in 0..dims.m {
        for (a, p) in pulse.iter().enumerate() {
            let n = m * dims.nu + a;
            if n < dims.m_h {
                pr[(m, n)] = Complex64::new(*p, 0.0);
            }
        }
    }
    Ok(pr)
}
