"""Seeded unstable mode for alpha < 0: the distance grows like exp(Re(lambda) t)."""
from lognls_star import instability_growth_rate, linearization_spectrum


def main():
    n, k, alpha = 3, 1, -1.0
    lin = linearization_spectrum(n, k, alpha)
    print(f"spectral abscissa of the linearization: {lin.abscissa:.5f}")
    fit = instability_growth_rate(n, k, alpha, seed_amplitude=1e-4)
    print(f"fitted growth rate {fit.rate_fit:.5f} over t in [{fit.window[0]:.2f}, {fit.window[1]:.2f}], "
          f"ratio {fit.ratio:.3f}")


if __name__ == "__main__":
    main()
