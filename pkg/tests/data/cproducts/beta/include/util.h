#ifndef BETA_UTIL_H
#define BETA_UTIL_H

/* identical converter as in the sibling variants */
static double deg_to_rad(double degrees) {
    return degrees * 3.14159265358979 / 180.0;
}

#endif
