#pragma once
#include <cstdint>
#include <memory>
#include <vector>

namespace asmoments {

class CycInt;

// Field elements are packed base-p digit strings: digit i is the coefficient of y^i.
using Elem = std::uint32_t;

bool is_prime(long n);

// Irreducibility over F_p of a monic coefficient vector (low degree first).
bool is_irreducible_fp(const std::vector<int>& m, int p);
std::vector<int> least_irreducible(int p, int degree);

class FieldCtx {
 public:
  FieldCtx(int p, int degree);

  int p() const { return p_; }
  int degree() const { return e_; }
  std::uint64_t size() const { return q_; }
  const std::vector<int>& modulus() const { return mod_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_int(long c) const;
  Elem gen() const;  // the class of y

  std::vector<int> coeffs(Elem x) const;
  Elem pack(const std::vector<int>& c) const;

  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const;
  Elem inv(Elem a) const;
  Elem pow(Elem a, std::uint64_t k) const;
  Elem frobenius(Elem a) const;
  Elem scale(Elem a, int c) const;  // multiply by an element of F_p
  int trace(Elem a) const;          // absolute trace to F_p
  int trace_by_powers(Elem a) const;

  // log/exp tables over a fixed primitive element; log(0) is stored as -1
  std::int32_t log(Elem a) const { return log_[a]; }
  Elem exp(std::int64_t k) const;
  Elem primitive() const { return prim_; }

 private:
  int p_, e_;
  std::uint64_t q_;
  std::vector<int> mod_;
  std::vector<std::uint64_t> pw_;  // p^i
  std::vector<int> trace_basis_;   // tr(y^i)
  std::vector<std::int32_t> log_;
  std::vector<Elem> exp_;
  std::vector<std::int32_t> zech_;  // log(1 + g^k), -1 if zero
  std::vector<Elem> add_tab_;       // full tables for small fields
  std::vector<Elem> mul_tab_;
  Elem prim_ = 1;
  bool small_ = false;

  Elem add_slow(Elem a, Elem b) const;
  Elem mul_slow(Elem a, Elem b) const;
  Elem neg_slow(Elem a) const;
};

using Field = std::shared_ptr<const FieldCtx>;

// Cached, thread-safe.
Field make_field(int p, int degree);

struct FieldElem {
  Field ctx;
  Elem v = 0;
  std::vector<int> coeffs() const { return ctx->coeffs(v); }
  FieldElem operator+(const FieldElem& o) const { return {ctx, ctx->add(v, o.v)}; }
  FieldElem operator-(const FieldElem& o) const { return {ctx, ctx->sub(v, o.v)}; }
  FieldElem operator*(const FieldElem& o) const { return {ctx, ctx->mul(v, o.v)}; }
  bool operator==(const FieldElem& o) const { return v == o.v && ctx == o.ctx; }
};

int abs_trace(const FieldElem& x);
CycInt psi_value(int c, int p);

// Ring embedding of F_{p^e} into F_{p^E}, e | E. The generator goes to the
// smallest packed root of the source modulus.
class Embedding {
 public:
  Embedding(Field src, Field dst);
  Elem operator()(Elem x) const { return table_[x]; }
  Elem image_of_gen() const { return root_; }
  const Field& src() const { return src_; }
  const Field& dst() const { return dst_; }

 private:
  Field src_, dst_;
  Elem root_ = 0;
  std::vector<Elem> table_;
};

std::shared_ptr<const Embedding> make_embedding(int p, int e, int n);
FieldElem embed(const FieldElem& x, const Field& into);

}  // namespace asmoments
