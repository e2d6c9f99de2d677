"""One entry per residual name that can appear in a report.

Every residual is an operator norm (or an absolute scalar difference) that
should vanish when the stated identity holds.
"""
from __future__ import annotations

RELATIONS: dict[str, str] = {
    # modular theory of a single space
    "j-omega": "J Omega = Omega",
    "delta-omega": "Delta Omega = Omega",
    "j-involution": "J J = 1",
    "j-delta-j": "J Delta J = Delta^{-1}",
    "jmj-commutant": "J pi(M) J lies in pi(M)'",
    "commutant-dim": "dim pi(M)' = dim pi(M) (count mismatch)",
    "double-commutant": "pi(M)'' = pi(M)",
    "kms": "<J Delta^{1/2} a Omega, J Delta^{1/2} b Omega> = <a* Omega, b* Omega>",
    "modular-density": "sigma_t(x) = rho^{it} x rho^{-it}",
    # stochastic map flags
    "unital": "Phi(1) = 1",
    "cp": "block Gram [Phi(E_i* E_j)] is positive semidefinite",
    "state-preserving": "phi_2 o Phi = phi_1",
    "prop1-i": "the duality solution Phi# is unital completely positive",
    "prop1-ii": "Phi intertwines the modular groups (generator and sampled t)",
    "prop1-iii": "J_2 U = U J_1",
    # Stinespring space of a map
    "st1": "Lambda* sigma(A) Lambda = A",
    "st2": "Lambda Lambda* commutes with sigma(M_1)",
    "stdual": "tau(M_2') commutes with sigma(M_1)",
    "st5": "Lambda* tau(Y) Lambda = Phi'(Y)",
    "v-tau-v": "V* tau(Y) V = Y",
    "vv-commutant": "V V* commutes with tau(M_2')",
    "u-factor": "U = V* Lambda",
    "reconstruct": "V* sigma(A) V = Phi(A)",
    "sigma-hom": "sigma is a *-homomorphism",
    "tau-hom": "tau is multiplicative",
    "isometry-V": "V* V = 1",
    "isometry-Lambda": "Lambda* Lambda = 1",
    "expect": "<Omega_2, V* T V Omega_2> = <Omega_1, Lambda* T Lambda Omega_1> = <Omega_Phi, T Omega_Phi>",
    "dilation-welldef": "sigma and tau preserve the null space of the Gram form",
    # the anti-unitary W between the spaces of Phi# and Phi'
    "w-antiunitary": "W* W = W W* = 1",
    "w-welldef": "W is well defined on the quotient",
    "w-tau": "W* tau'(A_1) W = tau#(J_1 A_1 J_1)",
    "w-sigma": "W* sigma'(Y_2) W = sigma#(J_2 Y_2 J_2)",
    "identification-unitary": "X (x) h -> pi_2(X) (x) h is unitary between the two spaces",
    "identification-welldef": "the identification is well defined on the quotient",
    "identification-sigma": "the identification carries sigma# to sigma'",
    "sharp-equals-prime": "Phi' = Phi# once M_i' is identified with pi_i(M_i)",
    # Jhat
    "jhat-antiunitary": "Jhat* Jhat = Jhat Jhat* = 1",
    "antiunij": "Jhat V = V J_1",
    "jhat-involution": "Jhat Jhat = 1",
    "jhat-welldef": "Jhat* is well defined on the quotient",
    "jhat-defining": "Jhat T' Omega = (J_2 Lambda* T' Lambda J_2) (x) Omega_1 for T' in sigma(M_2)'",
    "jhat-beta-sigma": "Jhat* tau(J_1 A J_1) Jhat = sigma(Phi(A))",
    "jhat-lambda": "Jhat Lambda = Lambda J_2",
    # factorization certificates
    "cond1-a": "V* R V lies in pi_1(M_1)",
    "cond1-b": "Lambda* R Lambda lies in pi_2(M_2)",
    "factor-phi": "Lambda* beta(A) Lambda = Phi(A)",
    "factor-sharp": "V* alpha(B) V = Phi#(B)",
    "lambda-unitary": "Lambda Lambda* = 1 (deterministic maps)",
    "separating": "Omega is separating for R (0 yes, 1 no)",
    "sufficient-lambda": "Jhat Lambda = Lambda J_2 (sufficient condition)",
    "sufficient-commute": "sigma(M_2) commutes with beta(M_1) (sufficient condition)",
    "alpha-hom": "alpha is a *-homomorphism",
    "beta-hom": "beta is a *-homomorphism",
    "alpha-state": "omega o alpha = phi_2",
    "beta-state": "omega o beta = phi_1",
    "alpha-markov": "largest Markov residual of alpha",
    "beta-markov": "largest Markov residual of beta",
    "alpha-consistent": "the three Markov conditions agree for alpha (0 yes, 1 no)",
    "beta-consistent": "the three Markov conditions agree for beta (0 yes, 1 no)",
    "alpha-sharp-formula": "alpha#(T) = Lambda* T Lambda",
    "beta-sharp-formula": "beta#(T) = V* T V",
    # conditional expectations
    "CCE-1": "J_s nabla_1 = nabla_1 J_1",
    "CCE-2": "J_s nabla_2 = nabla_2 J_2",
    "xi-state": "<xi, pi_s(X) xi> = <Omega, X Omega> on R",
    "xi-cone": "xi lies in the natural positive cone",
    "nabla1-isometry": "nabla_1* nabla_1 = 1",
    "nabla2-isometry": "nabla_2* nabla_2 = 1",
    "E1-membership": "E_1(R) lies in pi_1(M_1)",
    "E2-membership": "E_2(R) lies in pi_2(M_2)",
    "E1-unital": "E_1(1) = 1",
    "E2-unital": "E_2(1) = 1",
    "E1-cp": "E_1 is completely positive",
    "E2-cp": "E_2 is completely positive",
    "E1-expect": "<Omega_1, E_1(X) Omega_1> = omega(X)",
    "E2-expect": "<Omega_2, E_2(X) Omega_2> = omega(X)",
    "E1-compression": "E_1(X) = V* X V",
    "E2-compression": "E_2(X) = Lambda* X Lambda",
    "E1-inclusion": "E_1(beta(A)) = A",
    "E2-inclusion": "E_2(sigma(B)) = B",
    "Xi-welldef": "Xi is well defined on the quotient",
    "Xi-isometry": "Xi* Xi = 1",
    "Xi-V": "Xi V = nabla_1",
    "Xi-Lambda": "Xi Lambda = nabla_2",
    "Xi-jhat": "Jhat V = Xi* J_s Xi V",
    "prop5-adjoint-1": "<Omega, X beta(A) Omega> = <Omega_1, E_1(X) A Omega_1>",
    "prop5-adjoint-2": "<Omega, X sigma(B) Omega> = <Omega_2, E_2(X) B Omega_2>",
    "cor1-sharp": "Phi# = beta# o alpha through E_1",
    "cor1-phi": "Phi = alpha# o beta through E_2",
    "remark1-fwd": "CCE implies E_1 = V* . V and E_2 = Lambda* . Lambda (0 holds, 1 violated)",
    "remark1-bwd": "E_1 = V* . V and E_2 = Lambda* . Lambda imply CCE (0 holds, 1 violated)",
    # tensor-square factorization of a state
    "alpha-sharp-tensor": "alpha#(A (x) B) = <Omega, B Omega> A",
    "beta-sharp-tensor": "beta#(A (x) B) = <Omega, A Omega> B",
    "beta-sharp-alpha": "beta#(alpha(a)) = phi(a) 1",
    "alpha-sharp-beta": "alpha#(beta(a)) = phi(a) 1",
}


def describe(name: str) -> str:
    try:
        return RELATIONS[name]
    except KeyError:
        raise KeyError(f"unregistered relation name {name!r}") from None
