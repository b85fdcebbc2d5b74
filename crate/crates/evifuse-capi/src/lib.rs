//! C ABI for the conflict-aware evidential fusion calculus.
//!
//! Opinions are opaque handles created and freed by this library. Every
//! fallible function returns an [`EvifuseStatus`]; outputs go through `out`
//! pointers. Belief vectors cross the boundary as caller-owned `double`
//! buffers whose length must equal the opinion's class count.
//!
//! The generated header lands in `include/evifuse.h`.

use std::os::raw::c_char;

use evifuse::error::Error;
use evifuse::fusion;
use evifuse::loss::{self, LabelEncoding};
use evifuse::mapping::{MappingMatrix, COARSE_CLASSES, FINE_CLASSES};
use evifuse::opinion::{dirichlet_to_opinion, evidence_to_dirichlet, Evidence, Opinion};
use evifuse::specfn;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvifuseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    DomainError = 4,
}

/// Fusion strategies selectable through the C API.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvifuseStrategy {
    Cmam = 0,
    AverageEvidence = 1,
    HarmonicReference = 2,
}

/// Opaque opinion handle.
pub struct EvifuseOpinion {
    inner: Opinion,
}

fn status_of(err: &Error) -> EvifuseStatus {
    match err {
        Error::DimensionMismatch { .. } => EvifuseStatus::DimensionMismatch,
        Error::Domain(_) | Error::Numerical(_) => EvifuseStatus::DomainError,
        _ => EvifuseStatus::InvalidArgument,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn evifuse_status_message(status: EvifuseStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        EvifuseStatus::Ok => b"ok\0",
        EvifuseStatus::NullPointer => b"null pointer argument\0",
        EvifuseStatus::InvalidArgument => b"invalid argument\0",
        EvifuseStatus::DimensionMismatch => b"dimension mismatch\0",
        EvifuseStatus::DomainError => b"argument outside function domain\0",
    };
    msg.as_ptr() as *const c_char
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn box_out(out: *mut *mut EvifuseOpinion, opinion: Opinion) -> EvifuseStatus {
    unsafe {
        *out = Box::into_raw(Box::new(EvifuseOpinion { inner: opinion }));
    }
    EvifuseStatus::Ok
}

/// Builds an opinion from a non-negative evidence vector of length `len`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be a valid
/// destination pointer. The returned handle must be released with
/// [`evifuse_opinion_free`].
#[no_mangle]
pub unsafe extern "C" fn evifuse_opinion_from_evidence(
    values: *const f64,
    len: usize,
    out: *mut *mut EvifuseOpinion,
) -> EvifuseStatus {
    if out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    let Some(values) = slice_arg(values, len) else {
        return EvifuseStatus::NullPointer;
    };
    match Evidence::new(values.to_vec()) {
        Ok(e) => box_out(out, dirichlet_to_opinion(&evidence_to_dirichlet(&e))),
        Err(e) => status_of(&e),
    }
}

/// Builds an opinion from explicit belief masses and an uncertainty mass
/// (which must sum to one).
///
/// # Safety
/// `belief` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn evifuse_opinion_new(
    belief: *const f64,
    len: usize,
    uncertainty: f64,
    out: *mut *mut EvifuseOpinion,
) -> EvifuseStatus {
    if out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    let Some(belief) = slice_arg(belief, len) else {
        return EvifuseStatus::NullPointer;
    };
    match Opinion::new(belief.to_vec(), uncertainty) {
        Ok(o) => box_out(out, o),
        Err(e) => status_of(&e),
    }
}

/// Releases an opinion handle. Null is accepted and ignored.
///
/// # Safety
/// `opinion` must be a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evifuse_opinion_free(opinion: *mut EvifuseOpinion) {
    if !opinion.is_null() {
        drop(Box::from_raw(opinion));
    }
}

/// Number of classes of an opinion.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn evifuse_opinion_class_count(
    opinion: *const EvifuseOpinion,
    out: *mut usize,
) -> EvifuseStatus {
    if opinion.is_null() || out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    *out = (*opinion).inner.class_count();
    EvifuseStatus::Ok
}

/// Copies the belief vector into `buf`, which must hold exactly the class
/// count.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn evifuse_opinion_belief(
    opinion: *const EvifuseOpinion,
    buf: *mut f64,
    len: usize,
) -> EvifuseStatus {
    if opinion.is_null() || buf.is_null() {
        return EvifuseStatus::NullPointer;
    }
    let o = &(*opinion).inner;
    if len != o.class_count() {
        return EvifuseStatus::DimensionMismatch;
    }
    std::ptr::copy_nonoverlapping(o.belief().as_ptr(), buf, len);
    EvifuseStatus::Ok
}

/// Uncertainty mass of an opinion.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn evifuse_opinion_uncertainty(
    opinion: *const EvifuseOpinion,
    out: *mut f64,
) -> EvifuseStatus {
    if opinion.is_null() || out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    *out = (*opinion).inner.uncertainty();
    EvifuseStatus::Ok
}

/// Degree of conflict between two opinions, in `[0, 1]`.
///
/// # Safety
/// All pointers must be valid handles / destinations.
#[no_mangle]
pub unsafe extern "C" fn evifuse_conflict_degree(
    a: *const EvifuseOpinion,
    b: *const EvifuseOpinion,
    out: *mut f64,
) -> EvifuseStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    match fusion::conflict_degree(&(*a).inner, &(*b).inner) {
        Ok(c) => {
            *out = c.value();
            EvifuseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Conflict-aware pairwise fusion.
///
/// # Safety
/// All pointers must be valid; the result must be freed.
#[no_mangle]
pub unsafe extern "C" fn evifuse_fuse_pair(
    a: *const EvifuseOpinion,
    b: *const EvifuseOpinion,
    out: *mut *mut EvifuseOpinion,
) -> EvifuseStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    match fusion::cmam_fuse_pair(&(*a).inner, &(*b).inner) {
        Ok(o) => box_out(out, o),
        Err(e) => status_of(&e),
    }
}

/// Left fold of the selected strategy over `n` opinions in the given order.
///
/// # Safety
/// `opinions` must point to `n` valid handles; `out` must be valid; the
/// result must be freed.
#[no_mangle]
pub unsafe extern "C" fn evifuse_fuse_many(
    opinions: *const *const EvifuseOpinion,
    n: usize,
    strategy: EvifuseStrategy,
    out: *mut *mut EvifuseOpinion,
) -> EvifuseStatus {
    if opinions.is_null() || out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    let handles = std::slice::from_raw_parts(opinions, n);
    let mut owned = Vec::with_capacity(n);
    for &h in handles {
        if h.is_null() {
            return EvifuseStatus::NullPointer;
        }
        owned.push((*h).inner.clone());
    }
    let fused = match strategy {
        EvifuseStrategy::Cmam => fusion::cmam_fuse_many(&owned),
        EvifuseStrategy::AverageEvidence => fusion::average_fuse_opinions(&owned),
        EvifuseStrategy::HarmonicReference => fusion::harmonic_reference_fuse_many(&owned),
    };
    match fused {
        Ok(o) => box_out(out, o),
        Err(e) => status_of(&e),
    }
}

/// Argmax class under the projected probabilities `b_k + u/K`.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn evifuse_predicted_class(
    opinion: *const EvifuseOpinion,
    out: *mut usize,
) -> EvifuseStatus {
    if opinion.is_null() || out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    *out = fusion::predicted_class(&(*opinion).inner);
    EvifuseStatus::Ok
}

/// Maps a length-3 coarse evidence vector (W, NREM, REM) onto the five fine
/// classes with the uniform NREM split. `out5` receives five doubles.
///
/// # Safety
/// `coarse` must point to 3 readable doubles and `out5` to 5 writable ones.
#[no_mangle]
pub unsafe extern "C" fn evifuse_map_coarse_evidence(
    coarse: *const f64,
    out5: *mut f64,
) -> EvifuseStatus {
    if out5.is_null() {
        return EvifuseStatus::NullPointer;
    }
    let Some(coarse) = slice_arg(coarse, COARSE_CLASSES) else {
        return EvifuseStatus::NullPointer;
    };
    let mapped = Evidence::new(coarse.to_vec())
        .and_then(|e| MappingMatrix::uniform().map_evidence(&e));
    match mapped {
        Ok(fine) => {
            std::ptr::copy_nonoverlapping(fine.values().as_ptr(), out5, FINE_CLASSES);
            EvifuseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn loss_args(
    evidence: *const f64,
    k: usize,
    true_class: usize,
) -> Result<(Evidence, LabelEncoding), EvifuseStatus> {
    let values = slice_arg(evidence, k).ok_or(EvifuseStatus::NullPointer)?;
    let e = Evidence::new(values.to_vec()).map_err(|e| status_of(&e))?;
    let y = LabelEncoding::new(true_class, k).map_err(|e| status_of(&e))?;
    Ok((e, y))
}

/// Accuracy loss for one evidence vector against a true class.
///
/// # Safety
/// `evidence` must point to `k` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn evifuse_loss_acc(
    evidence: *const f64,
    k: usize,
    true_class: usize,
    out: *mut f64,
) -> EvifuseStatus {
    if out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    let (e, y) = match loss_args(evidence, k, true_class) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match loss::l_acc(&e, &y) {
        Ok(v) => {
            *out = v;
            EvifuseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Misleading-evidence KL regularizer.
///
/// # Safety
/// Same contract as [`evifuse_loss_acc`].
#[no_mangle]
pub unsafe extern "C" fn evifuse_loss_kl(
    evidence: *const f64,
    k: usize,
    true_class: usize,
    out: *mut f64,
) -> EvifuseStatus {
    if out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    let (e, y) = match loss_args(evidence, k, true_class) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match loss::l_kl(&e, &y) {
        Ok(v) => {
            *out = v;
            EvifuseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Annealing coefficient `min(1, epoch/10)`.
#[no_mangle]
pub extern "C" fn evifuse_annealing(epoch: usize) -> f64 {
    loss::annealing(epoch)
}

/// Gradient of `l_acc + annealing(epoch) * l_kl` with respect to the
/// evidence; `grad_out` receives `k` doubles.
///
/// # Safety
/// `evidence` must point to `k` readable doubles and `grad_out` to `k`
/// writable ones.
#[no_mangle]
pub unsafe extern "C" fn evifuse_loss_gradient(
    evidence: *const f64,
    k: usize,
    true_class: usize,
    epoch: usize,
    grad_out: *mut f64,
) -> EvifuseStatus {
    if grad_out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    let (e, y) = match loss_args(evidence, k, true_class) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match loss::loss_gradient(&e, &y, epoch) {
        Ok(g) => {
            std::ptr::copy_nonoverlapping(g.as_ptr(), grad_out, k);
            EvifuseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn unary_specfn(
    f: fn(f64) -> evifuse::error::Result<f64>,
    x: f64,
    out: *mut f64,
) -> EvifuseStatus {
    if out.is_null() {
        return EvifuseStatus::NullPointer;
    }
    match f(x) {
        Ok(v) => {
            *out = v;
            EvifuseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Natural log of the gamma function, `x > 0`.
///
/// # Safety
/// `out` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn evifuse_log_gamma(x: f64, out: *mut f64) -> EvifuseStatus {
    unary_specfn(specfn::log_gamma, x, out)
}

/// Digamma function, `x > 0`.
///
/// # Safety
/// `out` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn evifuse_digamma(x: f64, out: *mut f64) -> EvifuseStatus {
    unary_specfn(specfn::digamma, x, out)
}

/// Trigamma function, `x > 0`.
///
/// # Safety
/// `out` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn evifuse_trigamma(x: f64, out: *mut f64) -> EvifuseStatus {
    unary_specfn(specfn::trigamma, x, out)
}
