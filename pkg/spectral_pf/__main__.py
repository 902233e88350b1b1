from spectral_pf.cli import run

run()
