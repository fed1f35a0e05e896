# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lane of the partition-scan kernel.

Same contract and scan order as ``_kernel_pure.minimize_over_partitions``,
with the objective comparisons done in C int64 arithmetic. Inputs whose
magnitudes could overflow the int64 cross-products raise OverflowError so
the dispatcher can fall back to the pure lane.
"""

from libc.stdlib cimport free, malloc

DEF MAX_GROUND = 20


def minimize_over_partitions(int n, ent):
    """Return ``(best_num, best_den, minimizers, run_num, run_den, has_run)``.

    See ``_kernel_pure.minimize_over_partitions`` for the exact contract.
    """
    if n < 2:
        raise ValueError("need at least two elements")
    if n > MAX_GROUND:
        raise OverflowError(f"compiled lane supports at most {MAX_GROUND} elements")
    cdef Py_ssize_t size = <Py_ssize_t> 1 << n
    if len(ent) != size:
        raise ValueError(f"entropy array must have {size} entries")

    cdef long long *table = <long long *> malloc(size * sizeof(long long))
    if table == NULL:
        raise MemoryError()
    cdef Py_ssize_t idx
    cdef long long value, max_abs = 0
    cdef long long limit
    try:
        for idx in range(size):
            value = ent[idx]  # raises OverflowError for over-wide Python ints
            table[idx] = value
            if value < 0:
                value = -value
            if value > max_abs:
                max_abs = value
        # |num| <= (n + 1) * max_abs and cross-products multiply by a
        # denominator < n, so this bound keeps everything inside int64.
        limit = (<long long> 1 << 62) // ((n + 1) * n)
        if max_abs > limit:
            raise OverflowError("entropy values too large for the compiled lane")

        return _scan(n, table)
    finally:
        free(table)


cdef _scan(int n, long long *table):
    cdef int a[MAX_GROUND]
    cdef int b[MAX_GROUND]
    cdef long long blocks[MAX_GROUND]
    cdef int i, j, k, m, k_blocks
    cdef long long total = table[(<Py_ssize_t> 1 << n) - 1]
    cdef long long num, lhs, rhs
    cdef long long best_num = 0, run_num = 0
    cdef int den, best_den = 0, run_den = 0
    cdef list minimizers = []

    for i in range(n):
        a[i] = 0
        b[i] = 1

    while True:
        j = n - 1
        while j > 0 and a[j] == b[j]:
            j -= 1
        if j == 0:
            break
        a[j] += 1
        m = b[j] if b[j] > a[j] + 1 else a[j] + 1
        for k in range(j + 1, n):
            a[k] = 0
            b[k] = m

        k_blocks = m
        for k in range(k_blocks):
            blocks[k] = 0
        for i in range(n):
            blocks[a[i]] |= <long long> 1 << i
        num = -total
        for k in range(k_blocks):
            num += table[<Py_ssize_t> blocks[k]]
        den = k_blocks - 1

        if best_den == 0:
            best_num = num
            best_den = den
            minimizers = [tuple([a[i] for i in range(n)])]
            continue
        lhs = num * best_den
        rhs = best_num * den
        if lhs < rhs:
            run_num = best_num
            run_den = best_den
            best_num = num
            best_den = den
            minimizers = [tuple([a[i] for i in range(n)])]
        elif lhs == rhs:
            minimizers.append(tuple([a[i] for i in range(n)]))
        elif run_den == 0 or num * run_den < run_num * den:
            run_num = num
            run_den = den

    return best_num, best_den, minimizers, run_num, run_den, run_den != 0
