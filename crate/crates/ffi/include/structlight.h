#ifndef STRUCTLIGHT_H
#define STRUCTLIGHT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_NUMERICAL = 3,
  SL_STATUS_BUFFER_TOO_SMALL = 4,
  SL_STATUS_PANIC = 5,
} SlStatus;

/*
 Multipole order of a transition.
 */
typedef enum SlMultipole {
  SL_MULTIPOLE_E1 = 0,
  SL_MULTIPOLE_E2_DELTA_J1 = 1,
  SL_MULTIPOLE_E2_DELTA_J2 = 2,
} SlMultipole;

/*
 Opaque beam handle.
 */
typedef struct SlBeam SlBeam;

/*
 Opaque map handle.
 */
typedef struct SlMap SlMap;

typedef struct SlComplex {
  double re;
  double im;
} SlComplex;

/*
 Field value and Jacobian; `jacobian[3 * i + j] = d_i E_j`.
 */
typedef struct SlFieldSample {
  struct SlComplex e[3];
  struct SlComplex jacobian[9];
} SlFieldSample;

/*
 Sub-transition `|j1 m1> -> |j2 m2>`, all quantum numbers doubled.
 */
typedef struct SlTransition {
  int32_t twice_j1;
  int32_t twice_m1;
  int32_t twice_j2;
  int32_t twice_m2;
  enum SlMultipole multipole;
} SlTransition;

/*
 Quantization-axis tilt: rotation by `theta_rad` about the unit vector `axis`.
 */
typedef struct SlGeometry {
  double theta_rad;
  double axis[3];
} SlGeometry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the length the full message needs, including
 the terminator.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t sl_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/*
 Laguerre-Gauss beam. Lengths in metres, `sigma` in {-1, 0, 1}.

 # Safety
 `out` must be valid for a pointer write.
 */
enum SlStatus sl_beam_lg(int32_t l,
                         uint32_t p,
                         int32_t sigma_index,
                         double wavelength,
                         double waist,
                         struct SlBeam **out);

/*
 Hermite-Gauss beam.

 # Safety
 `out` must be valid for a pointer write.
 */
enum SlStatus sl_beam_hg(uint32_t m,
                         uint32_t n,
                         int32_t sigma_index,
                         double wavelength,
                         double waist,
                         struct SlBeam **out);

/*
 Radially polarized beam.

 # Safety
 `out` must be valid for a pointer write.
 */
enum SlStatus sl_beam_radial(double wavelength, double waist, struct SlBeam **out);

/*
 Azimuthally polarized beam.

 # Safety
 `out` must be valid for a pointer write.
 */
enum SlStatus sl_beam_azimuthal(double wavelength, double waist, struct SlBeam **out);

/*
 Beam from its JSON description (the `beam.spec` object of a sidecar).

 # Safety
 `json` must be a NUL-terminated string; `out` must be valid for a pointer write.
 */
enum SlStatus sl_beam_from_json(const char *json, struct SlBeam **out);

/*
 Releases a beam. Null is ignored.

 # Safety
 `beam` must come from one of the `sl_beam_*` constructors and not be used afterwards.
 */
void sl_beam_free(struct SlBeam *beam);

/*
 Field value and Jacobian at `(x, y, z)` in metres, by the analytic backend.

 # Safety
 `beam` must be a live handle and `out` valid for a write.
 */
enum SlStatus sl_beam_field(const struct SlBeam *beam,
                            double x,
                            double y,
                            double z,
                            struct SlFieldSample *out);

/*
 Relative transition strength at `(x, y, z)`. A null `geometry` means an
 untilted quantization axis along `z`.

 # Safety
 `beam` and `trans` must be valid, `geometry` null or valid, `out` valid for a write.
 */
enum SlStatus sl_strength(const struct SlBeam *beam,
                          double x,
                          double y,
                          double z,
                          const struct SlTransition *trans,
                          const struct SlGeometry *geometry,
                          struct SlComplex *out);

/*
 `<j1 m1; j2 m2 | j m>` with doubled quantum numbers.

 # Safety
 `out` must be valid for a write.
 */
enum SlStatus sl_clebsch_gordan(int32_t twice_j1,
                                int32_t twice_m1,
                                int32_t twice_j2,
                                int32_t twice_m2,
                                int32_t twice_j,
                                int32_t twice_m,
                                double *out);

/*
 Wigner small-d element `d^j_{m_out, m_in}(theta)` with doubled quantum numbers.

 # Safety
 `out` must be valid for a write.
 */
enum SlStatus sl_wigner_small_d(int32_t twice_j,
                                int32_t twice_m_out,
                                int32_t twice_m_in,
                                double theta,
                                double *out);

/*
 Runs one scan described by a JSON scan configuration
 (`grid`, `beam`, `observable`, optional `backend` and `keep_complex`).

 # Safety
 `config_json` must be a NUL-terminated string; `out` valid for a pointer write.
 */
enum SlStatus sl_scan_from_json(const char *config_json, struct SlMap **out);

/*
 Grid size of a map.

 # Safety
 `map` must be a live handle; `nx` and `ny` valid for writes.
 */
enum SlStatus sl_map_dims(const struct SlMap *map, size_t *nx, size_t *ny);

/*
 Global maximum of the raw moduli (zero for an identically zero map).

 # Safety
 `map` must be a live handle; `out` valid for a write.
 */
enum SlStatus sl_map_scale_factor(const struct SlMap *map, double *out);

/*
 Copies the normalized values, row-major with `y` outer, into `buf`.

 # Safety
 `map` must be a live handle; `buf` valid for `len` doubles.
 */
enum SlStatus sl_map_values(const struct SlMap *map, double *buf, size_t len);

/*
 Releases a map. Null is ignored.

 # Safety
 `map` must come from [`sl_scan_from_json`] and not be used afterwards.
 */
void sl_map_free(struct SlMap *map);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRUCTLIGHT_H */
