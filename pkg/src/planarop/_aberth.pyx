# cython: language_level=3, boundscheck=False, wraparound=False
"""Aberth-Ehrlich iteration over MPFR (compiled kernel).

Numbers cross the boundary as mpmath values; mantissas travel as hex
strings so no bits are lost either way.
"""

from libc.stdlib cimport malloc, free

import mpmath as mp

KERNEL = "cython"


cdef extern from "mpfr.h":
    ctypedef long mpfr_prec_t
    ctypedef long mpfr_exp_t
    ctypedef struct __mpfr_struct:
        mpfr_prec_t _mpfr_prec
        int _mpfr_sign
        mpfr_exp_t _mpfr_exp
        void *_mpfr_d
    ctypedef __mpfr_struct *mpfr_ptr
    ctypedef const __mpfr_struct *mpfr_srcptr
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN
    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_set_str(mpfr_ptr, const char *, int, mpfr_rnd_t)
    char *mpfr_get_str(char *, mpfr_exp_t *, int, size_t, mpfr_srcptr, mpfr_rnd_t)
    void mpfr_free_str(char *)
    int mpfr_mul_2si(mpfr_ptr, mpfr_srcptr, long, mpfr_rnd_t)
    int mpfr_add(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_div(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_sqr(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_neg(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_hypot(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_fma(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_fms(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_cmp(mpfr_srcptr, mpfr_srcptr)
    int mpfr_cmp_ui(mpfr_srcptr, unsigned long)
    int mpfr_zero_p(mpfr_srcptr)


cdef mpfr_rnd_t R = MPFR_RNDN


cdef __mpfr_struct *alloc(Py_ssize_t n, mpfr_prec_t prec):
    cdef __mpfr_struct *a = <__mpfr_struct *>malloc(n * sizeof(__mpfr_struct))
    cdef Py_ssize_t i
    if a == NULL:
        raise MemoryError()
    for i in range(n):
        mpfr_init2(&a[i], prec)
    return a


cdef void release(__mpfr_struct *a, Py_ssize_t n):
    cdef Py_ssize_t i
    if a != NULL:
        for i in range(n):
            mpfr_clear(&a[i])
        free(a)


def _raw_parts(c):
    if isinstance(c, mp.mpc):
        return c._mpc_
    if isinstance(c, mp.mpf):
        return c._mpf_, mp.mpf(0)._mpf_
    with mp.workprec(2048):
        return mp.mpc(c)._mpc_


cdef set_from_raw(mpfr_ptr dst, raw):
    sign, man, exp, _ = raw
    if not man:
        mpfr_set_ui(dst, 0, R)
        return
    s = ("-" if sign else "") + format(man, "x")
    b = s.encode("ascii")
    mpfr_set_str(dst, b, 16, R)
    mpfr_mul_2si(dst, dst, exp, R)


cdef to_mpf(mpfr_srcptr src):
    cdef mpfr_exp_t e = 0
    cdef char *s
    if mpfr_zero_p(src):
        return mp.mpf(0)
    s = mpfr_get_str(NULL, &e, 16, 0, src, R)
    try:
        txt = s.decode("ascii")
    finally:
        mpfr_free_str(s)
    neg = txt.startswith("-")
    digits = txt[1:] if neg else txt
    man = int(digits, 16)
    # value = 0.digits * 16^e
    return mp.make_mpf(mp.libmp.from_man_exp(-man if neg else man, 4 * (e - len(digits))))


def aberth(coeffs, roots, bits, tol_log2, max_iter):
    """Same contract as the pure-Python kernel."""
    cdef Py_ssize_t n = len(coeffs) - 1
    cdef mpfr_prec_t prec = bits
    cdef Py_ssize_t i, j, k
    cdef int sweeps = 0
    cdef int n_active = n
    cdef long tl = tol_log2
    cdef long rl = -bits + 4 + int(n).bit_length()
    cdef __mpfr_struct *cr = alloc(n + 1, prec)
    cdef __mpfr_struct *ci = alloc(n + 1, prec)
    cdef __mpfr_struct *ca = alloc(n + 1, prec)
    cdef __mpfr_struct *zr = alloc(n, prec)
    cdef __mpfr_struct *zi = alloc(n, prec)
    cdef __mpfr_struct *nr = alloc(n, prec)
    cdef __mpfr_struct *ni = alloc(n, prec)
    # scratch: p, dp, s, ratio, w, t, abs values
    cdef __mpfr_struct *t = alloc(20, prec)
    cdef char *active = <char *>malloc(n)
    cdef mpfr_ptr pr = &t[0]
    cdef mpfr_ptr pi = &t[1]
    cdef mpfr_ptr dr = &t[2]
    cdef mpfr_ptr di = &t[3]
    cdef mpfr_ptr sr = &t[4]
    cdef mpfr_ptr si = &t[5]
    cdef mpfr_ptr qr = &t[6]
    cdef mpfr_ptr qi = &t[7]
    cdef mpfr_ptr wr = &t[8]
    cdef mpfr_ptr wi = &t[9]
    cdef mpfr_ptr t1 = &t[10]
    cdef mpfr_ptr t2 = &t[11]
    cdef mpfr_ptr t3 = &t[12]
    cdef mpfr_ptr az = &t[13]
    cdef mpfr_ptr pa = &t[14]
    cdef mpfr_ptr lim = &t[15]
    cdef mpfr_ptr mc = &t[16]
    cdef mpfr_ptr aw = &t[17]
    cdef mpfr_ptr xr = &t[18]
    cdef mpfr_ptr xi = &t[19]
    try:
        if active == NULL:
            raise MemoryError()
        for k in range(n + 1):
            re_, im_ = _raw_parts(coeffs[k])
            set_from_raw(&cr[k], re_)
            set_from_raw(&ci[k], im_)
            mpfr_hypot(&ca[k], &cr[k], &ci[k], R)
        for i in range(n):
            re_, im_ = _raw_parts(roots[i])
            set_from_raw(&zr[i], re_)
            set_from_raw(&zi[i], im_)
            active[i] = 1
        mpfr_set_ui(mc, 0, R)
        while n_active > 0 and sweeps < max_iter:
            sweeps += 1
            mpfr_set_ui(mc, 0, R)
            for i in range(n):
                mpfr_set(&nr[i], &zr[i], R)
                mpfr_set(&ni[i], &zi[i], R)
            for i in range(n):
                if not active[i]:
                    continue
                # Horner for p, p' and the absolute-value bound
                mpfr_set(pr, &cr[n], R)
                mpfr_set(pi, &ci[n], R)
                mpfr_set_ui(dr, 0, R)
                mpfr_set_ui(di, 0, R)
                mpfr_hypot(az, &zr[i], &zi[i], R)
                mpfr_set(pa, &ca[n], R)
                for k in range(n - 1, -1, -1):
                    # dp = dp*z + p
                    mpfr_mul(t1, dr, &zr[i], R)
                    mpfr_fms(t1, di, &zi[i], t1, R)
                    mpfr_neg(t1, t1, R)
                    mpfr_mul(t2, dr, &zi[i], R)
                    mpfr_fma(t2, di, &zr[i], t2, R)
                    mpfr_add(dr, t1, pr, R)
                    mpfr_add(di, t2, pi, R)
                    # p = p*z + c_k
                    mpfr_mul(t1, pr, &zr[i], R)
                    mpfr_fms(t1, pi, &zi[i], t1, R)
                    mpfr_neg(t1, t1, R)
                    mpfr_mul(t2, pr, &zi[i], R)
                    mpfr_fma(t2, pi, &zr[i], t2, R)
                    mpfr_add(pr, t1, &cr[k], R)
                    mpfr_add(pi, t2, &ci[k], R)
                    mpfr_fma(pa, pa, az, &ca[k], R)
                # stop when |p| is at the rounding level
                mpfr_hypot(t1, pr, pi, R)
                mpfr_mul_2si(t2, pa, rl, R)
                if mpfr_cmp(t1, t2) <= 0:
                    active[i] = 0
                    n_active -= 1
                    continue
                # ratio q = p / dp
                mpfr_sqr(t3, dr, R)
                mpfr_fma(t3, di, di, t3, R)
                mpfr_mul(t1, pr, dr, R)
                mpfr_fma(t1, pi, di, t1, R)
                mpfr_mul(t2, pi, dr, R)
                mpfr_fms(t2, pr, di, t2, R)
                mpfr_neg(t2, t2, R)
                mpfr_div(qr, t1, t3, R)
                mpfr_div(qi, t2, t3, R)
                # s = sum 1/(z_i - z_j)
                mpfr_set_ui(sr, 0, R)
                mpfr_set_ui(si, 0, R)
                for j in range(n):
                    if j == i:
                        continue
                    mpfr_sub(xr, &zr[i], &zr[j], R)
                    mpfr_sub(xi, &zi[i], &zi[j], R)
                    mpfr_sqr(t3, xr, R)
                    mpfr_fma(t3, xi, xi, t3, R)
                    mpfr_div(t1, xr, t3, R)
                    mpfr_div(t2, xi, t3, R)
                    mpfr_add(sr, sr, t1, R)
                    mpfr_sub(si, si, t2, R)
                # den = 1 - q*s ; w = q / den
                mpfr_mul(t1, qr, sr, R)
                mpfr_fms(t1, qi, si, t1, R)
                mpfr_neg(t1, t1, R)
                mpfr_mul(t2, qr, si, R)
                mpfr_fma(t2, qi, sr, t2, R)
                mpfr_set_ui(xr, 1, R)
                mpfr_sub(xr, xr, t1, R)
                mpfr_neg(xi, t2, R)
                mpfr_sqr(t3, xr, R)
                mpfr_fma(t3, xi, xi, t3, R)
                mpfr_mul(t1, qr, xr, R)
                mpfr_fma(t1, qi, xi, t1, R)
                mpfr_mul(t2, qi, xr, R)
                mpfr_fms(t2, qr, xi, t2, R)
                mpfr_neg(t2, t2, R)
                mpfr_div(wr, t1, t3, R)
                mpfr_div(wi, t2, t3, R)
                mpfr_sub(&nr[i], &zr[i], wr, R)
                mpfr_sub(&ni[i], &zi[i], wi, R)
                mpfr_hypot(aw, wr, wi, R)
                if mpfr_cmp(aw, mc) > 0:
                    mpfr_set(mc, aw, R)
                # tolerance 2^tl * max(1, |z|)
                if mpfr_cmp_ui(az, 1) > 0:
                    mpfr_mul_2si(lim, az, tl, R)
                else:
                    mpfr_set_ui(lim, 1, R)
                    mpfr_mul_2si(lim, lim, tl, R)
                if mpfr_cmp(aw, lim) <= 0:
                    active[i] = 0
                    n_active -= 1
            for i in range(n):
                mpfr_set(&zr[i], &nr[i], R)
                mpfr_set(&zi[i], &ni[i], R)
        out = [mp.make_mpc((to_mpf(&zr[i])._mpf_, to_mpf(&zi[i])._mpf_)) for i in range(n)]
        return out, sweeps, n_active == 0, to_mpf(mc)
    finally:
        release(cr, n + 1)
        release(ci, n + 1)
        release(ca, n + 1)
        release(zr, n)
        release(zi, n)
        release(nr, n)
        release(ni, n)
        release(t, 20)
        free(active)
