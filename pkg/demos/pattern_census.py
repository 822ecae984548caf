"""Which small measurement sets can detect entanglement at all?

Per-party relabeling of the X/Y/Z axes cannot change detection power, so
the 36 two-element and 84 three-element supports collapse into a handful
of classes.  Any set confined to a single row or column ("line") is
provably blind; everything else detects some entangled state.
"""

from entcert.grids import MeasurementSet
from entcert.patterns import classify, enumerate_orbits


def main() -> None:
    for text in ("XX,ZZ", "ZX,ZY", "XX,YY,ZZ", "XX,XY,YX", "XX,XY,XZ"):
        pattern = classify(MeasurementSet.parse(text))
        canonical = ",".join(pattern.canonical.labels())
        flag = "detects" if pattern.detects else "blind"
        print(f"{text:<10} -> {pattern.tag:<16} (canonical {canonical:<10}) {flag}")

    for k in (2, 3):
        print(f"\nrelabeling classes of {k}-element sets:")
        for rep, members in enumerate_orbits(k):
            canonical = ",".join(rep.canonical.labels())
            flag = "detects" if rep.detects else "blind"
            print(f"    {rep.tag:<16} x{len(members):<3} e.g. {canonical:<10} {flag}")


if __name__ == "__main__":
    main()
