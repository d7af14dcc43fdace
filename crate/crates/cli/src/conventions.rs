//! Text printed by `qclass explain-conventions`.

pub const HANDBOOK: &str = r#"qclass sign conventions
=======================

Algebra
  Functions are polynomials in even coordinates tensored with the exterior
  algebra on the odd ones, with exact rational coefficients. Odd factors
  are kept in chart order; moving one odd factor past another costs a sign.
  Partial derivatives act from the left: d/dt1 (t1*t2) = t2 and
  d/dt2 (t1*t2) = -t1.

Tensors
  A (p,q) tensor is stored by components T^{i1..ip}_{j1..jq}. The component
  word is read as coefficient, then the upper slots (d/dz^i), then the
  lower slots (dz^j). All Koszul signs follow from this order. Component
  parity is the tensor parity plus the parities of its indices.
  Endomorphisms are (1,1) tensors; composition and evaluation contract the
  lower slot of the left factor with the upper slot of the right one.
  The supertrace is the contraction of that pair: sum_i (-1)^|i| A^i_i. It
  vanishes on graded commutators and Str(id) = (#even) - (#odd).

Vector fields and the coboundary
  [X,Y] = XY - (-1)^{|X||Y|} YX. L_X acts on tensors as a derivation of
  degree |X| that commutes with contractions. The coboundary is delta = L_Q
  with Q odd and [Q,Q] = 0; delta^2 = 0 on every tensor.

Connections
  Christoffel symbols Gamma^k_{ij} are given for both orders of (i,j) and
  must satisfy Gamma^k_{ji} = (-1)^{|i||j|} Gamma^k_{ij}; an entry has
  parity |i|+|j|+|k|. Nothing is symmetrized silently.
  nabla_X T inserts X into a new first lower slot: nabla T(X, ...) is
  nabla_X T. Curvature R_{XY} = [nabla_X, nabla_Y] - nabla_{[X,Y]}.
  The (1,3) curvature tensor evaluated on X then Y gives
  (-1)^{|X||Y|} R_{XY}.

Lambda and Omega
  Lambda = nabla Q, an odd endomorphism. Inserting X gives nabla_X Q; as an
  endomorphism applied to X it gives (-1)^{|X|} nabla_X Q
  = nabla_Q X - [Q,X].
  Omega_X = nabla_X Lambda - R_{XQ}. As a (1,2) tensor Omega is odd, since
  Omega_X has parity |X|+1. delta Omega = 0.

Series
  B_n = Omega * ... * Omega (n factors, B_0 = id); the product contracts the
  endomorphism input of the left factor with the output of the right one,
  so B_n(X1..Xn) = Omega_{X1} o ... o Omega_{Xn}.
  C_n = Str B_n for n >= 1; A_n = Str Lambda^{2n+1} for flat connections;
  P_n = Str R_{QQ}^{2n}; Qpow n = Q tensored with itself n times.
  Multi-slot forms are evaluated by inserting arguments left to right into
  the first free lower slot. The sign removed when passing X_l over the
  earlier arguments is sum_{k<l} |X_l| (|X_k| + 1) for Omega, B and C.
  C_n satisfies the cyclic law
  C_n(X1..Xn) = (-1)^{e1 e2} C_n(Xn, X1..X_{n-1}),
  e1 = |Xn|+1, e2 = sum_{k<n} (|Xk|+1).

Exactness and transgression
  Exactness searches for a witness of bounded even degree by exact
  elimination over the rationals; a witness is always re-verified. On
  purely odd charts the search covers the whole space and a negative
  answer is conclusive.
  Transgression works on M x R^{1|1} with the reserved coordinates _t
  (even) and _th (odd), Q~ = Q + _th d/d_t and nabla~ = _t nabla1 +
  (1-_t) nabla0. Psi is the _th-linear part of the series there, with the
  _th derivative taken from the left, integrated over _t in [0,1]. Then
  delta Psi = C[nabla1] - C[nabla0].

Expressions
  expr := ('+'|'-')? term (('+'|'-') term)*, term := factor ('*' factor)*,
  factor := primary ('^' natural)*, primary := rational | name | (expr).
  '*' is mandatory. Powers above 1 need an even base. Products are formed
  left to right, so t2*t1 = -t1*t2 for odd t1, t2.
"#;
