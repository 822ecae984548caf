"""Product-state bounds and certification beyond two parties.

The separable bound for a multipartite Pauli observable is its maximum
over product states, found by cyclic single-site power iteration.  Four
GHZ-stabilizer correlators at value 1 then certify genuine three-qubit
entanglement: the observable's product-state maximum is 3, while the
GHZ state reaches 4.
"""

from entcert.multipartite import (
    ObservableSum,
    ne_multipartite,
    spi_lambda_max,
)


def main() -> None:
    words = ["XXX", "ZZI", "ZIZ", "IZZ"]
    obs = ObservableSum.from_pauli_strings([(1.0, w) for w in words])

    spi = spi_lambda_max(obs)
    print(f"product-state maximum : {spi.lambda_max:.6f}")
    print(f"restarts / converged  : {spi.restarts_used} / {spi.converged}")

    # GHZ stabilizer data: every listed correlator is exactly 1
    result = ne_multipartite(words, [1.0, 1.0, 1.0, 1.0])
    print(f"normalized estimation : {result.value:.6f}")
    print(f"verdict               : {result.verdict}")
    print(f"coefficients          : "
          + ", ".join(f"{w}={c:+.3f}" for w, c in zip(result.labels, result.coefficients)))
    print(f"note                  : {result.note}")


if __name__ == "__main__":
    main()
