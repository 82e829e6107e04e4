#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dtri/types.hpp"

namespace dtri {

// Corner-position permutation attached to one use of a simplex inside a parent:
// perm[u] is the canonical corner position in the sub-simplex corresponding to
// the parent's u-th remaining canonical corner (ascending, with the dropped
// corner skipped).
using CornerPerm = std::array<std::int8_t, 4>;

struct Use {
  Index parent;  // id of the (k+1)-simplex using this k-simplex as a face
  int drop;      // canonical corner position of the parent opposite this face
};

// Top-simplex spec used by build_complex. `glue` is either empty (no gluing)
// or has one entry per face (face i opposite corner i); an empty string means
// the face is unglued, otherwise a label naming the pairing. A trailing '~'
// reverses this side's induced vertex order before the positional match.
struct TopSpec {
  std::vector<Index> labels;
  std::vector<std::string> glue;
};

struct Hinge {
  Index shared;          // (n-1)-simplex id
  Index top1, top2;      // n-simplex ids (uses; may coincide only via distinct drops)
  int drop1, drop2;      // apex corner positions within top1/top2
  Index apex1, apex2;    // vertex class ids at those corners
};

// A simplicial complex in the Delta-complex sense: simplices carry stable
// identifiers, faces are wired by identifier (vertex tuples do not determine
// edges once faces have been glued), and every face use records the corner
// correspondence onto the face's canonical corner order.
class SimplicialComplex {
 public:
  struct Simplex {
    std::vector<Index> corners;           // vertex class ids, canonical order
    std::vector<Index> labels;            // original vertex labels, canonical order
    std::vector<Index> faces;             // faces[i] opposite corner i ((k-1)-simplex id; vertex id for k=1)
    std::vector<CornerPerm> face_perms;   // correspondence for each face use
    std::vector<Use> cofaces;             // uses of this simplex by (k+1)-simplices
    bool alive = true;
  };

  int dimension() const { return n_; }

  // Vertex classes (the quotient after gluing). Labels are the pre-gluing
  // vertex names from the input; each class keeps its minimal label as
  // representative.
  Index vertex_count() const { return static_cast<Index>(class_label_.size()); }
  Index label_count() const { return label_count_; }
  Index vertex_label(Index v) const { return class_label_.at(v); }
  Index class_of_label(Index label) const { return label_class_.at(label); }
  bool has_explicit_gluing() const { return has_explicit_gluing_; }

  Index table_size(int k) const { return static_cast<Index>(tables_.at(k).size()); }
  const Simplex& simplex(int k, Index id) const { return tables_.at(k).at(id); }
  bool alive(int k, Index id) const { return tables_.at(k).at(id).alive; }
  std::vector<Index> alive_ids(int k) const;
  Index count_alive(int k) const;

  // Navigation within a top simplex: `mask` selects a subset of the top
  // simplex's corner positions (bit c = corner c). Returns the id of the
  // corresponding sub-simplex and the corner correspondence.
  Index sub_id(Index top, unsigned mask) const { return top_sub_.at(top).at(mask); }
  const CornerPerm& sub_perm(Index top, unsigned mask) const { return top_perm_.at(top).at(mask); }

  Index edge_tail(Index e) const { return tables_[1][e].corners[0]; }
  Index edge_head(Index e) const { return tables_[1][e].corners[1]; }

  std::vector<Hinge> hinges() const;
  Hinge hinge_of(Index shared) const;                 // interior (n-1)-simplex
  bool interior(Index shared) const;                  // (n-1)-simplex has 2 uses
  std::vector<std::pair<int, Index>> vertex_star(Index v) const;  // (dim, id), v a class id
  long euler_characteristic() const;
  bool closed() const;

  // Pseudomanifold plus, for n <= 3, vertex-link connectivity.
  void validate() const;

  // 2D edge flip surgery: replaces the hinge at `edge` ({i,j} with apexes
  // k,l) by the opposite diagonal. Topology only; metric updates are the
  // caller's job. New ids are appended, old ids go dead.
  struct FlipTopology {
    Index removed_edge = kInvalid;
    Index removed_tri1 = kInvalid, removed_tri2 = kInvalid;
    Index new_edge = kInvalid;
    Index new_tri1 = kInvalid, new_tri2 = kInvalid;  // {k,l,i} and {k,l,j}
  };
  FlipTopology flip(Index edge);

  friend SimplicialComplex build_complex(const std::vector<TopSpec>& tops, int n);

 private:
  void build_top_tables(Index top);
  void check_pseudomanifold() const;
  void check_vertex_links() const;

  int n_ = 0;
  Index label_count_ = 0;
  bool has_explicit_gluing_ = false;
  std::vector<Index> class_label_;             // class -> representative label
  std::vector<Index> label_class_;             // label -> class
  std::vector<std::vector<Simplex>> tables_;   // [k][id]
  std::vector<std::vector<Index>> top_sub_;    // [top][mask] -> sub-simplex id
  std::vector<std::vector<CornerPerm>> top_perm_;
};

SimplicialComplex build_complex(const std::vector<TopSpec>& tops, int n);
SimplicialComplex build_complex(const std::vector<std::vector<Index>>& tops, int n);

}  // namespace dtri
