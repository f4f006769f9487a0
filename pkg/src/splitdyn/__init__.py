"""splitdyn: exact arithmetic dynamics of diagonally split polynomial maps.

Library layout:
    polynomials / polyfactor / intfactor   exact arithmetic substrate
    dynsys                                 classification and commuting machinery
    subvar                                 structured subvarieties of (P^1)^n
    padic / verify / orbitcore             p-adic orbit certificates
    heights / mahler                       height theory and Mahler measure
    lab / cli                              experiment harness
"""

__version__ = "0.1.0"
