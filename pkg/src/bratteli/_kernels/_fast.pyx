# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled float transport kernels; drop-in twins of the _py versions.

Same pivot rules as the pure lane (lowest-index entering, lexicographic
leaving tie-break), so the two lanes agree on every instance.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def solve_transport(double[::1] a, double[::1] b, double[:, ::1] C, double tol):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t k = b.shape[0]
    cdef Py_ssize_t nb = m + k - 1
    cdef Py_ssize_t nn = m + k

    ci_arr = np.empty(nb, dtype=np.int64)
    cj_arr = np.empty(nb, dtype=np.int64)
    cf_arr = np.empty(nb, dtype=np.float64)
    cdef long long[::1] ci = ci_arr
    cdef long long[::1] cj = cj_arr
    cdef double[::1] cf = cf_arr

    ra_arr = np.array(a, copy=True)
    rb_arr = np.array(b, copy=True)
    cdef double[::1] ra = ra_arr
    cdef double[::1] rb = rb_arr

    cdef Py_ssize_t i = 0, j = 0, t = 0, n = 0
    cdef double flow
    while True:
        flow = ra[i] if ra[i] <= rb[j] else rb[j]
        if flow < 0.0:
            flow = 0.0
        ci[n] = i
        cj[n] = j
        cf[n] = flow
        ra[i] -= flow
        rb[j] -= flow
        n += 1
        if i == m - 1 and j == k - 1:
            break
        if (ra[i] <= rb[j] and i < m - 1) or j == k - 1:
            i += 1
        else:
            j += 1

    row_off_arr = np.empty(m + 1, dtype=np.int64)
    col_off_arr = np.empty(k + 1, dtype=np.int64)
    row_cells_arr = np.empty(nb, dtype=np.int64)
    col_cells_arr = np.empty(nb, dtype=np.int64)
    fill_arr = np.empty(nn, dtype=np.int64)
    u_arr = np.empty(m, dtype=np.float64)
    v_arr = np.empty(k, dtype=np.float64)
    seen_arr = np.empty(nn, dtype=np.int8)
    stack_arr = np.empty(nn, dtype=np.int64)
    parent_cell_arr = np.empty(nn, dtype=np.int64)
    parent_node_arr = np.empty(nn, dtype=np.int64)
    queue_arr = np.empty(nn, dtype=np.int64)
    path_arr = np.empty(nn, dtype=np.int64)
    cdef long long[::1] row_off = row_off_arr
    cdef long long[::1] col_off = col_off_arr
    cdef long long[::1] row_cells = row_cells_arr
    cdef long long[::1] col_cells = col_cells_arr
    cdef long long[::1] fill = fill_arr
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef signed char[::1] seen = seen_arr
    cdef long long[::1] stack = stack_arr
    cdef long long[::1] parent_cell = parent_cell_arr
    cdef long long[::1] parent_node = parent_node_arr
    cdef long long[::1] queue = queue_arr
    cdef long long[::1] path = path_arr

    cdef Py_ssize_t pivot, node, sp, qh, qt, ei, ej, cell, other, plen, idx
    cdef Py_ssize_t theta_cell, li, lj
    cdef double rc, theta, f
    cdef bint found
    cdef Py_ssize_t MAX_PIVOTS = 200000

    for pivot in range(MAX_PIVOTS):
        # adjacency of the basis tree (rows then cols, offset layout)
        for t in range(m + 1):
            row_off[t] = 0
        for t in range(k + 1):
            col_off[t] = 0
        for t in range(nb):
            row_off[ci[t] + 1] += 1
            col_off[cj[t] + 1] += 1
        for t in range(m):
            row_off[t + 1] += row_off[t]
        for t in range(k):
            col_off[t + 1] += col_off[t]
        for t in range(m):
            fill[t] = row_off[t]
        for t in range(k):
            fill[m + t] = col_off[t]
        for t in range(nb):
            row_cells[fill[ci[t]]] = t
            fill[ci[t]] += 1
            col_cells[fill[m + cj[t]]] = t
            fill[m + cj[t]] += 1

        # duals via DFS from row 0 (nodes: rows 0..m-1, cols m..m+k-1)
        for t in range(nn):
            seen[t] = 0
        u[0] = 0.0
        seen[0] = 1
        stack[0] = 0
        sp = 1
        while sp > 0:
            sp -= 1
            node = stack[sp]
            if node < m:
                for t in range(row_off[node], row_off[node + 1]):
                    cell = row_cells[t]
                    other = m + cj[cell]
                    if not seen[other]:
                        seen[other] = 1
                        v[cj[cell]] = C[node, cj[cell]] - u[node]
                        stack[sp] = other
                        sp += 1
            else:
                for t in range(col_off[node - m], col_off[node - m + 1]):
                    cell = col_cells[t]
                    other = ci[cell]
                    if not seen[other]:
                        seen[other] = 1
                        u[other] = C[other, node - m] - v[node - m]
                        stack[sp] = other
                        sp += 1

        # entering: first negative reduced cost, row-major
        found = False
        ei = 0
        ej = 0
        for i in range(m):
            for j in range(k):
                rc = C[i, j] - u[i] - v[j]
                if rc < -tol:
                    ei = i
                    ej = j
                    found = True
                    break
            if found:
                break
        if not found:
            break

        # BFS for the tree path row ei -> col ej
        for t in range(nn):
            seen[t] = 0
        seen[ei] = 1
        queue[0] = ei
        qh = 0
        qt = 1
        while qh < qt:
            node = queue[qh]
            qh += 1
            if node == m + ej:
                break
            if node < m:
                for t in range(row_off[node], row_off[node + 1]):
                    cell = row_cells[t]
                    other = m + cj[cell]
                    if not seen[other]:
                        seen[other] = 1
                        parent_cell[other] = cell
                        parent_node[other] = node
                        queue[qt] = other
                        qt += 1
            else:
                for t in range(col_off[node - m], col_off[node - m + 1]):
                    cell = col_cells[t]
                    other = ci[cell]
                    if not seen[other]:
                        seen[other] = 1
                        parent_cell[other] = cell
                        parent_node[other] = node
                        queue[qt] = other
                        qt += 1

        plen = 0
        node = m + ej
        while node != ei:
            path[plen] = parent_cell[node]
            node = parent_node[node]
            plen += 1
        # reverse in place so the path starts at row ei
        for t in range(plen // 2):
            idx = path[t]
            path[t] = path[plen - 1 - t]
            path[plen - 1 - t] = idx

        # minus cells sit at even path positions; pick theta and the leaving
        # cell with lexicographic tie-break
        theta = -1.0
        theta_cell = -1
        for t in range(0, plen, 2):
            cell = path[t]
            f = cf[cell]
            if theta_cell == -1 or f < theta:
                theta = f
                theta_cell = cell
            elif f == theta:
                li = ci[theta_cell]
                lj = cj[theta_cell]
                if ci[cell] < li or (ci[cell] == li and cj[cell] < lj):
                    theta_cell = cell
        for t in range(plen):
            if t % 2 == 0:
                cf[path[t]] -= theta
            else:
                cf[path[t]] += theta
        ci[theta_cell] = ei
        cj[theta_cell] = ej
        cf[theta_cell] = theta
    else:
        raise RuntimeError("transport simplex failed to converge")

    cdef double cost = 0.0
    for t in range(nb):
        if cf[t] > 0.0:
            cost += C[ci[t], cj[t]] * cf[t]
    return cost, ci_arr, cj_arr, cf_arr


cdef inline double _pair_min(double a1, double b1, double d11, double d12,
                             double d21, double d22) nogil:
    cdef double lo = a1 + b1 - 1.0
    cdef double hi = a1 if a1 <= b1 else b1
    cdef double base, slope, c1, c2, val
    if lo < 0.0:
        lo = 0.0
    base = a1 * d12 + b1 * d21 + (1.0 - a1 - b1) * d22
    slope = d11 - d12 - d21 + d22
    c1 = base + lo * slope
    c2 = base + hi * slope
    val = c1 if c1 <= c2 else c2
    return val if val > 0.0 else 0.0


def transfer_table_2(long long[:, ::1] sup_idx, double[:, ::1] sup_w,
                     double[:, ::1] D):
    cdef Py_ssize_t S = sup_idx.shape[0]
    out_arr = np.empty((S, S), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t x, y
    cdef long long p1, p2, q1, q2
    cdef double a1, b1, val
    with nogil:
        for x in range(S):
            p1 = sup_idx[x, 0]
            p2 = sup_idx[x, 1]
            a1 = sup_w[x, 0]
            out[x, x] = 0.0
            for y in range(x + 1, S):
                q1 = sup_idx[y, 0]
                q2 = sup_idx[y, 1]
                b1 = sup_w[y, 0]
                val = _pair_min(a1, b1, D[p1, q1], D[p1, q2], D[p2, q1], D[p2, q2])
                out[x, y] = val
                out[y, x] = val
    return out_arr


def transfer_rows_2(long long[::1] centers, long long[:, ::1] sup_idx,
                    double[:, ::1] sup_w, double[:, ::1] D):
    cdef Py_ssize_t R = centers.shape[0]
    cdef Py_ssize_t S = sup_idx.shape[0]
    out_arr = np.empty((R, S), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, y
    cdef long long c, p1, p2, q1, q2
    cdef double a1, b1
    with nogil:
        for r in range(R):
            c = centers[r]
            p1 = sup_idx[c, 0]
            p2 = sup_idx[c, 1]
            a1 = sup_w[c, 0]
            for y in range(S):
                q1 = sup_idx[y, 0]
                q2 = sup_idx[y, 1]
                b1 = sup_w[y, 0]
                out[r, y] = _pair_min(a1, b1, D[p1, q1], D[p1, q2],
                                      D[p2, q1], D[p2, q2])
            out[r, c] = 0.0
    return out_arr
