#ifndef FGT_FGT_H
#define FGT_FGT_H

/* C interface to the adaptive Gauss transform engine.
 *
 * Objects are opaque handles created and destroyed by this library.
 * Functions that can fail either return a status code or NULL; in both
 * cases fgt_last_error() / fgt_last_status() describe the failure for the
 * calling thread. Buffers returned through double** / char** are owned by
 * the caller and released with fgt_free().
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    FGT_OK = 0,
    FGT_ERR_INVALID = 1,    /* bad argument or malformed content */
    FGT_ERR_REFINEMENT = 2, /* adaptive refinement hit the depth cap */
    FGT_ERR_IO = 3,         /* file could not be read or written */
    FGT_ERR_INTERNAL = 4
} fgt_status;

typedef struct fgt_tree fgt_tree;
typedef struct fgt_boundary fgt_boundary;
typedef struct fgt_result fgt_result;

const char* fgt_last_error(void);
fgt_status fgt_last_status(void);
void fgt_free(void* p);

/* ---- source trees --------------------------------------------------- */

/* Fills out[i] with f(xy[2i], xy[2i+1]) for i < n. */
typedef void (*fgt_sampler)(const double* xy, int n, double* out, void* ctx);

/* Square domain centered at (cx, cy); k is the per-leaf grid order.
 * Constructors return NULL on failure. */
fgt_tree* fgt_tree_uniform(double cx, double cy, double side, int k,
                           int levels);
fgt_tree* fgt_tree_adaptive(double cx, double cy, double side, int k,
                            fgt_sampler f, void* ctx, double tol,
                            int max_levels);
fgt_tree* fgt_tree_from_points(double cx, double cy, double side, int k,
                               const double* xy, const double* strength,
                               long n, int max_per_leaf, int max_levels);
fgt_tree* fgt_tree_from_json(const char* text);
char* fgt_tree_to_json(const fgt_tree* t);
void fgt_tree_free(fgt_tree* t);

int fgt_tree_order(const fgt_tree* t);
int fgt_tree_max_level(const fgt_tree* t);
long fgt_tree_leaf_count(const fgt_tree* t);
long fgt_tree_grid_size(const fgt_tree* t); /* leaf_count * k * k */

/* Coordinates of every leaf grid point in canonical leaf order;
 * xy must hold 2 * grid_size doubles (x then y per point). */
fgt_status fgt_tree_grid_points(const fgt_tree* t, double* xy);

/* Replaces all leaf samples; n must equal grid_size. */
fgt_status fgt_tree_set_samples(fgt_tree* t, const double* vals, long n);

fgt_status fgt_tree_add_points(fgt_tree* t, const double* xy,
                               const double* strength, long n);
/* dir holds the (nonzero) dipole directions, 2 doubles per source. */
fgt_status fgt_tree_add_dipoles(fgt_tree* t, const double* xy,
                                const double* strength, const double* dir,
                                long n);

/* Domain mean of the piecewise polynomial interpolant of grid values
 * (canonical order, n = grid_size). */
fgt_status fgt_grid_mean(const fgt_tree* t, const double* vals, long n,
                         double* out);

/* ---- transform ------------------------------------------------------ */

typedef struct {
    double delta;            /* kernel width: exp(-|x-y|^2 / delta) */
    double eps;              /* accuracy target in [1e-14, 1e-1] */
    int periodic;            /* 0 free space, 1 periodic on the domain */
    double kernel_prefactor; /* output scale; accuracy is eps of the
                              * unscaled transform times this factor */
    int threads;             /* <= 0: all hardware threads */
    int force_path;          /* 0 auto, 1 Hermite shifts, 2 plane waves */
    int want_grid;           /* produce outputs on the leaf grids */
} fgt_params;

void fgt_params_init(fgt_params* p);

/* Runs the transform of the tree's volume, point and dipole sources.
 * Builds the tree's interaction lists on first use (hence non-const).
 * targets_xy may be NULL when n_targets is 0. */
fgt_status fgt_transform(fgt_tree* t, const fgt_params* p,
                         const double* targets_xy, long n_targets,
                         fgt_result** out);

typedef struct {
    int l_cut;            /* first level within kernel range */
    double r_c;           /* kernel cutoff radius, scaled units */
    int used_pw;          /* any level ran the plane-wave path */
    long far_translations;
    long near_applies;
    long point_kernel_evals;
    long boundary_corrections; /* boundary transforms only */
    double seconds_build;      /* plan + operator precompute */
    double seconds_upward;
    double seconds_downward;
    double seconds_near;
    double seconds_total;
} fgt_stats;

long fgt_result_grid_size(const fgt_result* r);
const double* fgt_result_grid(const fgt_result* r); /* NULL if no grid */
long fgt_result_point_count(const fgt_result* r);
const double* fgt_result_points(const fgt_result* r);
fgt_stats fgt_result_stats(const fgt_result* r);
void fgt_result_free(fgt_result* r);

/* ---- boundary layers ------------------------------------------------ */

fgt_boundary* fgt_boundary_from_json(const char* text);
char* fgt_boundary_to_json(const fgt_boundary* b);
/* Elliptical test curve split into nseg pieces of the given geometry
 * order, carrying a smooth reference density; dipole selects the double
 * layer. */
fgt_boundary* fgt_boundary_ellipse(int nseg, int order, int dipole);
void fgt_boundary_free(fgt_boundary* b);
long fgt_boundary_segment_count(const fgt_boundary* b);

/* Layer potential at the targets (free space). Uses p->delta, eps and
 * threads; grid and path options are ignored. */
fgt_status fgt_boundary_transform(const fgt_boundary* b, const fgt_params* p,
                                  const double* targets_xy, long n_targets,
                                  fgt_result** out);

/* ---- reference evaluators (slow, for verification) ------------------ */

/* Direct kernel sum over n points and n_dip dipoles; any of the source
 * groups may be empty (NULL pointers with zero count). domain_side is
 * used only when periodic. */
fgt_status fgt_direct_dgt(const double* xy, const double* strength, long n,
                          const double* dip_xy, const double* dip_strength,
                          const double* dip_dir, long n_dip,
                          const double* targets_xy, long m, double delta,
                          int periodic, double domain_side, double* out);

/* Quadrature evaluation of the tree's volume sources at m targets. */
fgt_status fgt_oracle_volume(const fgt_tree* t, const double* targets_xy,
                             long m, double delta, int periodic, double* out);

/* Adaptive-quadrature evaluation of the layer potential at m targets. */
fgt_status fgt_oracle_boundary(const fgt_boundary* b, const double* targets_xy,
                               long m, double delta, double* out);

/* ---- files ----------------------------------------------------------- */

/* FGTO container: "FGTO" magic, u32 version, u64 count, doubles. */
fgt_status fgt_write_fgto(const char* path, const double* vals, long n);
fgt_status fgt_read_fgto(const char* path, double** vals, long* n);
/* "x,y,value" rows; xy holds 2n doubles. */
fgt_status fgt_write_csv(const char* path, const double* xy,
                         const double* vals, long n);
fgt_status fgt_read_text(const char* path, char** text);
fgt_status fgt_write_text(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif /* FGT_FGT_H */
