"""Pure-Python similarity kernels.

Reference semantics for the compiled backend: every arithmetic step here
mirrors `_simkernel.pyx` operation for operation (integer intersection
and union sums, then one division and one weighted sum per pair), so the
two backends yield bitwise-identical matrices.
"""


def exact_rows(fp_ids, out, row_start, row_end):
    """Fill rows [row_start, row_end) of the exact-identity matrix."""
    fps = fp_ids.tolist()
    n = len(fps)
    for i in range(row_start, row_end):
        fp = fps[i]
        for j in range(i, n):
            s = 1.0 if fp == fps[j] else 0.0
            out[i, j] = s
            out[j, i] = s


def gradual_rows(kind_ids, port_ids, port_offsets, token_ids, token_counts,
                 token_offsets, w_sig, w_beh, out, row_start, row_end):
    """Fill rows [row_start, row_end) of the gradual-similarity matrix.

    kind mismatch -> 0; otherwise the signature/behavior Jaccard indices
    are combined as w_sig * jp + w_beh * jt (short-circuited to exactly
    1.0 when both indices are 1, clamped at 1.0 otherwise).
    """
    kinds = kind_ids.tolist()
    pids = port_ids.tolist()
    poff = port_offsets.tolist()
    tids = token_ids.tolist()
    tcnt = token_counts.tolist()
    toff = token_offsets.tolist()
    n = len(kinds)
    for i in range(row_start, row_end):
        out[i, i] = 1.0
        for j in range(i + 1, n):
            if kinds[i] != kinds[j]:
                s = 0.0
            else:
                jp = _set_jaccard(pids, poff[i], poff[i + 1],
                                  poff[j], poff[j + 1])
                jt = _multiset_jaccard(tids, tcnt, toff[i], toff[i + 1],
                                       toff[j], toff[j + 1])
                if jp == 1.0 and jt == 1.0:
                    s = 1.0
                else:
                    s = w_sig * jp + w_beh * jt
                    if s > 1.0:
                        s = 1.0
            out[i, j] = s
            out[j, i] = s


def _set_jaccard(ids, a, a_end, b, b_end):
    # merge-join over per-component id runs, both sorted ascending
    inter = 0
    union = 0
    while a < a_end and b < b_end:
        x = ids[a]
        y = ids[b]
        if x == y:
            inter += 1
            union += 1
            a += 1
            b += 1
        elif x < y:
            union += 1
            a += 1
        else:
            union += 1
            b += 1
    union += (a_end - a) + (b_end - b)
    if union == 0:
        return 1.0
    return inter / union


def _multiset_jaccard(ids, counts, a, a_end, b, b_end):
    mins = 0
    maxs = 0
    while a < a_end and b < b_end:
        x = ids[a]
        y = ids[b]
        if x == y:
            ca = counts[a]
            cb = counts[b]
            if ca < cb:
                mins += ca
                maxs += cb
            else:
                mins += cb
                maxs += ca
            a += 1
            b += 1
        elif x < y:
            maxs += counts[a]
            a += 1
        else:
            maxs += counts[b]
            b += 1
    while a < a_end:
        maxs += counts[a]
        a += 1
    while b < b_end:
        maxs += counts[b]
        b += 1
    if maxs == 0:
        return 1.0
    return mins / maxs
