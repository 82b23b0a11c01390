"""Pure Python GF(2) elimination on rows stored as Python ints."""


def eliminate(rows, ncols):
    """Forward-eliminate ``rows`` on their low ``ncols`` bits.

    Returns ``(rank, residues)`` where ``residues`` are the reduced rows
    whose low ``ncols`` bits vanished, in input order.
    """
    mask = (1 << ncols) - 1
    pivots = {}
    residues = []
    for row in rows:
        low = row & mask
        while low:
            lead = low & -low
            piv = pivots.get(lead)
            if piv is None:
                break
            row ^= piv
            low = row & mask
        if low:
            pivots[low & -low] = row
        else:
            residues.append(row)
    return len(pivots), residues
