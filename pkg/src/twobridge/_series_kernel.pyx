# cython: language_level=3
"""Compiled Stern-Brocot summation kernel.

Same contract as ``_series_fallback.explore``; slopes are tracked in C
int64, and any cell whose numbers would overflow is handed back to the
driver (DEFER_OVERFLOW), which re-enters it through the pure-Python kernel.
Keep the algorithm in sync with ``_series_fallback``.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc, PyMem_Realloc
from libc.math cimport sqrt

cdef extern from "complex.h":
    double complex csqrt(double complex) nogil
    double cabs(double complex) nogil
    double creal(double complex) nogil
    double cimag(double complex) nogil

cdef double PRUNE_MODULUS = 8.0
cdef double TAIL_COEFFICIENT = 10.0
cdef double COMB_STOP_ABS = 1e30
cdef double PARABOLIC_TOL = 1e-11
cdef double CENSUS_TOL = 1e-9
cdef double ELLIPTIC_IM_TOL = 1e-9
cdef double ELLIPTIC_RE_MARGIN = 1e-6
cdef long long OVERFLOW_LIMIT = (<long long>1) << 60

BACKEND = "compiled"

DEFER_ENDPOINT = 0
DEFER_MEDIANT = 1
DEFER_OVERFLOW = 2


cdef inline double complex h_c(double complex x) nogil:
    cdef double complex s = csqrt(1.0 - 4.0 / (x * x))
    if creal(s) < 0.0:
        s = -s
    return 0.5 * (1.0 - s)


cdef inline bint near_parabolic(double complex x) nogil:
    return cabs(x - 2.0) <= PARABOLIC_TOL or cabs(x + 2.0) <= PARABOLIC_TOL


cdef inline bint is_elliptic(double complex x) nogil:
    cdef double im = cimag(x)
    cdef double re = creal(x)
    if im < 0:
        im = -im
    if re < 0:
        re = -re
    return im <= ELLIPTIC_IM_TOL and re < 2.0 - ELLIPTIC_RE_MARGIN


cdef inline double cap_tail_c(double am, double au, double av, bint *crude) nogil:
    cdef double g, half, mu2
    if am <= 3.0:
        crude[0] = True
        return 1.0
    g = au if au < av else av
    if g >= PRUNE_MODULUS:
        crude[0] = False
        return TAIL_COEFFICIENT / (am * am)
    if g <= 2.0 + 1e-9:
        crude[0] = True
        return 1.0
    half = 0.5 * (g + sqrt(g * g - 4.0))
    mu2 = half * half
    crude[0] = False
    return 20.0 * (mu2 / (mu2 - 1.0)) / (am * am)


cdef struct Frame:
    long long u_num, u_den, v_num, v_den
    double complex phi_u, phi_v, phi_opp
    int depth
    double eps_share


cdef class _State:
    """C-side accumulator mirrored into the Python CellOutcome at the end."""
    cdef Frame *stack
    cdef int top, cap
    cdef double sum_re, sum_im, comp_re, comp_im, tail
    cdef long nodes
    cdef int max_seen
    cdef bint capped

    def __cinit__(self):
        self.cap = 4096
        self.stack = <Frame *> PyMem_Malloc(self.cap * sizeof(Frame))
        if self.stack == NULL:
            raise MemoryError()
        self.top = 0

    def __dealloc__(self):
        if self.stack != NULL:
            PyMem_Free(self.stack)

    cdef int push(self, long long u_num, long long u_den, double complex phi_u,
                  long long v_num, long long v_den, double complex phi_v,
                  double complex phi_opp, int depth, double eps_share) except -1:
        if self.top >= self.cap:
            self.cap *= 2
            self.stack = <Frame *> PyMem_Realloc(self.stack, self.cap * sizeof(Frame))
            if self.stack == NULL:
                raise MemoryError()
        self.stack[self.top].u_num = u_num
        self.stack[self.top].u_den = u_den
        self.stack[self.top].v_num = v_num
        self.stack[self.top].v_den = v_den
        self.stack[self.top].phi_u = phi_u
        self.stack[self.top].phi_v = phi_v
        self.stack[self.top].phi_opp = phi_opp
        self.stack[self.top].depth = depth
        self.stack[self.top].eps_share = eps_share
        self.top += 1
        return 0

    cdef void add(self, double re, double im) nogil:
        cdef double y, t
        y = re - self.comp_re
        t = self.sum_re + y
        self.comp_re = (t - self.sum_re) - y
        self.sum_re = t
        y = im - self.comp_im
        t = self.sum_im + y
        self.comp_im = (t - self.sum_im) - y
        self.sum_im = t


def explore(out, u_num, u_den, phi_u, v_num, v_den, phi_v, phi_opp,
            depth, eps_share, max_depth, node_budget=5_000_000):
    """Drop-in replacement for the pure-Python kernel's ``explore``."""
    if (abs(u_num) >= OVERFLOW_LIMIT or u_den >= OVERFLOW_LIMIT
            or abs(v_num) >= OVERFLOW_LIMIT or v_den >= OVERFLOW_LIMIT):
        out.deferred.append((DEFER_OVERFLOW, u_num, u_den, complex(phi_u),
                             v_num, v_den, complex(phi_v), complex(phi_opp),
                             depth, eps_share))
        return

    cdef _State st = _State()
    st.sum_re = out.sum_re
    st.sum_im = out.sum_im
    st.comp_re = out.comp_re
    st.comp_im = out.comp_im
    st.tail = out.tail
    st.nodes = out.nodes
    st.max_seen = out.max_depth_seen
    st.capped = out.depth_capped

    cdef long budget = node_budget
    cdef int maxd = max_depth
    cdef Frame f
    cdef long long m_num, m_den
    cdef double complex phi_m, hm
    cdef double am, au, av, est
    cdef bint crude_flag = False
    cdef int stop = 0  # 1 = elliptic, 2 = budget

    st.push(u_num, u_den, phi_u, v_num, v_den, phi_v, phi_opp, depth, eps_share)

    while st.top > 0:
        st.top -= 1
        f = st.stack[st.top]
        st.nodes += 1
        if f.depth > st.max_seen:
            st.max_seen = f.depth
        if st.nodes > budget:
            st.capped = True
            st.tail += 1.0
            break
        if near_parabolic(f.phi_u) or near_parabolic(f.phi_v):
            out.deferred.append((DEFER_ENDPOINT, f.u_num, f.u_den,
                                 complex(f.phi_u), f.v_num, f.v_den,
                                 complex(f.phi_v), complex(f.phi_opp),
                                 f.depth, f.eps_share))
            continue

        au = cabs(f.phi_u)
        av = cabs(f.phi_v)
        if (au if au < av else av) < PRUNE_MODULUS:
            stop = _comb(st, out, f, maxd)
            if stop:
                break
            continue

        m_num = f.u_num + f.v_num
        m_den = f.u_den + f.v_den
        if (m_num >= OVERFLOW_LIMIT or m_num <= -OVERFLOW_LIMIT
                or m_den >= OVERFLOW_LIMIT):
            out.deferred.append((DEFER_OVERFLOW, f.u_num, f.u_den,
                                 complex(f.phi_u), f.v_num, f.v_den,
                                 complex(f.phi_v), complex(f.phi_opp),
                                 f.depth, f.eps_share))
            continue
        phi_m = f.phi_u * f.phi_v - f.phi_opp

        if is_elliptic(phi_m):
            if out.elliptic is None:
                out.elliptic = (m_num, m_den, complex(phi_m))
            break

        if near_parabolic(phi_m):
            out.deferred.append((DEFER_MEDIANT, f.u_num, f.u_den,
                                 complex(f.phi_u), f.v_num, f.v_den,
                                 complex(f.phi_v), complex(f.phi_opp),
                                 f.depth, f.eps_share))
            continue

        am = cabs(phi_m)
        if am <= 2.0 + CENSUS_TOL:
            out.census.append((m_num, m_den, complex(phi_m)))

        if au >= PRUNE_MODULUS and av >= PRUNE_MODULUS and \
                cabs(f.phi_opp) <= 0.5 * au * av:
            est = TAIL_COEFFICIENT / (am * am)
            if est <= f.eps_share:
                st.tail += est
                continue

        hm = h_c(phi_m)
        st.add(2.0 * creal(hm), 2.0 * cimag(hm))

        if f.depth >= maxd:
            st.tail += cap_tail_c(am, au, av, &crude_flag)
            if crude_flag:
                st.capped = True
            continue

        st.push(m_num, m_den, phi_m, f.v_num, f.v_den, f.phi_v, f.phi_u,
                f.depth + 1, 0.5 * f.eps_share)
        st.push(f.u_num, f.u_den, f.phi_u, m_num, m_den, phi_m, f.phi_v,
                f.depth + 1, 0.5 * f.eps_share)

    out.sum_re = st.sum_re
    out.sum_im = st.sum_im
    out.comp_re = st.comp_re
    out.comp_im = st.comp_im
    out.tail = st.tail
    out.nodes = st.nodes
    out.max_depth_seen = st.max_seen
    out.depth_capped = st.capped


cdef int _comb(_State st, out, Frame f, int maxd) except -1:
    """Fan around the small-trace endpoint; returns 1 to abort (elliptic).

    Trace recurrence gamma_{n+1} = t gamma_n - gamma_{n-1} solved by
    gamma_n = P mu^n + Q mu^-n with mu + 1/mu = t, |mu| > 1; the walk stops
    once the geometric decay bounds the remainder inside the eps share.
    Like the parabolic fans, the comb runs past the depth cap: the remainder
    estimate is its analytic continuation.
    """
    cdef long long p_num, p_den, c_num, c_den, w_num, w_den
    cdef double complex t, gamma0, gamma1, gamma_prev, hm, root, mu, p_coef
    cdef double ag, mu2, beta = -1.0, grow, est, p_abs
    cdef long n = 0
    cdef int cell_depth
    cdef bint usable

    if cabs(f.phi_u) < cabs(f.phi_v):
        p_num, p_den, t = f.u_num, f.u_den, f.phi_u
        c_num, c_den, gamma0 = f.v_num, f.v_den, f.phi_v
    else:
        p_num, p_den, t = f.v_num, f.v_den, f.phi_v
        c_num, c_den, gamma0 = f.u_num, f.u_den, f.phi_u
    gamma_prev = f.phi_opp

    root = csqrt(0.25 * t * t - 1.0)
    mu = 0.5 * t + root
    if cabs(mu) < 1.0:
        mu = 0.5 * t - root
    mu2 = cabs(mu) * cabs(mu)
    usable = mu2 > 1.0 + 1e-9

    while True:
        n += 1
        st.nodes += 1
        gamma1 = t * gamma0 - gamma_prev
        w_num = c_num + p_num
        w_den = c_den + p_den
        cell_depth = f.depth + <int>min(n, 1000000)
        if cell_depth > st.max_seen and cell_depth <= maxd:
            st.max_seen = cell_depth
        if (abs(w_num) >= OVERFLOW_LIMIT or w_den >= OVERFLOW_LIMIT):
            out.deferred.append((DEFER_OVERFLOW, c_num, c_den, complex(gamma0),
                                 p_num, p_den, complex(t), complex(gamma_prev),
                                 cell_depth - 1, f.eps_share))
            return 0
        if is_elliptic(gamma1):
            if out.elliptic is None:
                out.elliptic = (w_num, w_den, complex(gamma1))
            return 1
        if near_parabolic(gamma1):
            out.deferred.append((DEFER_MEDIANT, c_num, c_den, complex(gamma0),
                                 p_num, p_den, complex(t), complex(gamma_prev),
                                 cell_depth - 1, f.eps_share))
            return 0
        if n == 1 and usable:
            p_coef = (gamma1 - gamma0 / mu) / (mu - 1.0 / mu)
            p_abs = cabs(p_coef)
            if p_abs > 0.0:
                beta = cabs(gamma0 - p_coef) / (p_abs * mu2)
        elif beta > 0.0:
            beta /= mu2
        ag = cabs(gamma1)
        if ag <= 2.0 + CENSUS_TOL:
            out.census.append((w_num, w_den, complex(gamma1)))
        hm = h_c(gamma1)
        st.add(2.0 * creal(hm), 2.0 * cimag(hm))
        st.push(w_num, w_den, gamma1, c_num, c_den, gamma0, t,
                cell_depth + 1, 0.3 * f.eps_share / (<double>n * n))

        if 0.0 <= beta and beta <= 0.25 and ag >= 32.0:
            grow = (1.0 + beta) * (1.0 + beta) / ((1.0 - beta) * (1.0 - beta))
            est = 8.0 * grow / ((mu2 - 1.0) * ag * ag)
            if est <= 0.5 * f.eps_share or ag >= COMB_STOP_ABS:
                st.tail += est
                return 0
        if n >= 500_000:
            st.tail += 1.0
            st.capped = True
            return 0
        gamma_prev = gamma0
        gamma0 = gamma1
        c_num = w_num
        c_den = w_den
